#include "doctest.h"

#include <cmath>
#include <algorithm>
#include <numbers>

#include "rqc/elliptic.hpp"
#include "rqc/errors.hpp"
#include "rqc/rng.hpp"

using namespace rqc;
using std::numbers::pi;

namespace {

// Independent evaluation of the boundary-coordinate Möbius in complex form.
double boundary_coordinate_complex(double theta)
{
    const Complex i(0, 1);
    Complex e = std::exp(i * theta);
    return (-i * (e + i) / (e - i)).real();
}

const std::array<double, 4> default_anchors{0, pi / 2, pi, 3 * pi / 2};

} // namespace

TEST_CASE("boundary coordinate anchors")
{
    CHECK(boundary_coordinate(0) == doctest::Approx(1.0));
    CHECK(boundary_coordinate(pi) == doctest::Approx(-1.0));
    CHECK(std::abs(boundary_coordinate(3 * pi / 2)) < 1e-15);
    CHECK(std::isinf(boundary_coordinate(pi / 2)));
    for (double t = 0.05; t < 2 * pi; t += 0.1) {
        if (std::abs(t - pi / 2) < 1e-3) continue;
        CHECK(boundary_coordinate(t) ==
              doctest::Approx(boundary_coordinate_complex(t)).epsilon(1e-12));
    }
}

TEST_CASE("cross ratio")
{
    double inf = std::numeric_limits<double>::infinity();
    CHECK(cross_ratio(2, 1, 0, inf) == doctest::Approx(2.0));
    CHECK(cross_ratio(5.5, 1, 0, inf) == doctest::Approx(5.5));
    CHECK_THROWS_AS(cross_ratio(1, 1, 0, inf), PreconditionError);

    KeyedRng rng(9, Stream::generic);
    for (int trial = 0; trial < 10; ++trial) {
        std::array<double, 4> p{};
        for (auto& x : p) x = rng.uniform(-5, 5);
        std::sort(p.begin(), p.end());
        double base = cross_ratio(p[0], p[1], p[2], p[3]);
        // Shared real Möbius with positive determinant.
        double a = rng.uniform(0.5, 2), b = rng.uniform(-1, 1), c = rng.uniform(-0.05, 0.05);
        double d = (1 + b * c) / a;
        std::array<double, 4> q{};
        for (int i = 0; i < 4; ++i) q[i] = (a * p[i] + b) / (c * p[i] + d);
        double moved = cross_ratio(q[0], q[1], q[2], q[3]);
        CHECK(std::abs(moved - base) <= 1e-10 * base);
    }
}

TEST_CASE("complex jacobi functions satisfy the basic identities")
{
    KeyedRng rng(3, Stream::generic);
    for (int trial = 0; trial < 50; ++trial) {
        double k = rng.uniform(0.05, 0.95);
        double kp = std::sqrt(1 - k * k);
        double Kp = elliptic_K(kp);
        Complex v(rng.uniform(-3, 3), rng.uniform(-0.5, 0.5) * Kp);
        auto j = jacobi(v, k);
        CHECK(std::abs(j.sn * j.sn + j.cn * j.cn - 1.0) < 1e-12);
        CHECK(std::abs(k * k * j.sn * j.sn + j.dn * j.dn - 1.0) < 1e-12);
        // derivative by central difference
        double h = 1e-5;
        Complex fd = (jacobi(v + h, k).sn - jacobi(v - h, k).sn) / (2 * h);
        CHECK(std::abs(fd - j.cn * j.dn) < 1e-8);
        Complex fdi = (jacobi(v + Complex(0, h), k).sn - jacobi(v - Complex(0, h), k).sn) /
                      Complex(0, 2 * h);
        CHECK(std::abs(fdi - j.cn * j.dn) < 1e-8);
    }
}

TEST_CASE("default anchors give a square cell")
{
    EllipticBaseMap map(default_anchors, arc_midpoints(default_anchors), 1.0);
    CHECK(map.cell_height() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(map.modulus() == doctest::Approx((std::sqrt(2.0) - 1) / (std::sqrt(2.0) + 1)));
}

TEST_CASE("base map corners, reflection and periods")
{
    std::array<double, 4> anchors{0.3, 1.4, 3.0, 4.4};
    std::array<double, 4> mids{0.9, 2.5, 3.4, 5.5};
    EllipticBaseMap map(anchors, mids, 1.7);
    double a = map.cell_width(), b = map.cell_height();
    for (long long i = -2; i <= 3; ++i) {
        for (long long j = -2; j <= 3; ++j) {
            Point corner(i * a, j * b);
            double expect = boundary_coordinate(map.midpoints()[vertex_label(i, j) - 1]);
            auto zeta = map.value_projective(corner);
            CHECK(std::abs(zeta[0] - expect * zeta[1]) <= 1e-8 * std::abs(zeta[1]) * (1 + std::abs(expect)));
        }
    }
    KeyedRng rng(5, Stream::generic);
    for (int trial = 0; trial < 100; ++trial) {
        Point z(rng.uniform(-3, 3), rng.uniform(-3, 3));
        Complex w = map.value(z);
        CHECK(std::abs(map.value(z + Complex(2 * a, 0)) - w) <= 1e-8 * (1 + std::abs(w)));
        CHECK(std::abs(map.value(z + Complex(0, 2 * b)) - w) <= 1e-8 * (1 + std::abs(w)));
        // Schwarz reflection across the vertical edge x = a and the horizontal edge y = 0.
        Point rx(2 * a - z.real(), z.imag());
        CHECK(std::abs(map.value(rx) - std::conj(w)) <= 1e-8 * (1 + std::abs(w)));
        Point ry(z.real(), -z.imag());
        CHECK(std::abs(map.value(ry) - std::conj(w)) <= 1e-8 * (1 + std::abs(w)));
        // hemisphere assignment
        auto [cx, cy] = map.cell_of(z);
        if (std::abs(w.imag()) > 1e-6) CHECK((w.imag() > 0) == upper_cell(cx, cy));
        // derivative
        double h = 1e-6;
        Complex fd = (map.value(z + h) - map.value(z - h)) / (2 * h);
        if (std::abs(w) < 20) CHECK(std::abs(fd - map.derivative(z)) < 1e-5 * (1 + std::abs(fd)));
        auto dp = map.disk(z);
        CHECK(std::abs(dp.u) <= 1 + 1e-9);
    }
}

TEST_CASE("anchor validation")
{
    CHECK_THROWS_AS(normalize_anchors({0, pi, pi / 2, 3 * pi / 2}), PreconditionError);
    CHECK_THROWS_AS(EllipticBaseMap(default_anchors, {0.1, 0.2, 0.3, 0.4}, 1.0),
                    PreconditionError);
}
