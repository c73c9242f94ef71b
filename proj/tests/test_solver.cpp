#include "doctest.h"

#include <chrono>
#include <cmath>
#include <numbers>

#include "rqc/errors.hpp"
#include "rqc/solver.hpp"
#include "rqc/transforms.hpp"

using namespace rqc;
using std::numbers::pi;

namespace {

// Tensor Gauss-Legendre (midpoint-refined) quadrature of f over the pixel at (mx, my) h.
template <class F>
Complex pixel_quadrature(F f, int mx, int my, double h, int sub = 64)
{
    static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                0.5384693101056831, 0.9061798459386640};
    static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                0.4786286704993665, 0.2369268850561891};
    Complex acc = 0;
    double s = h / sub;
    for (int a = 0; a < sub; ++a) {
        for (int b = 0; b < sub; ++b) {
            double cx = mx * h - h / 2 + (a + 0.5) * s;
            double cy = my * h - h / 2 + (b + 0.5) * s;
            for (int i = 0; i < 5; ++i) {
                for (int j = 0; j < 5; ++j) {
                    acc += w[i] * w[j] * f(Complex(cx + x[i] * s / 2, cy + x[j] * s / 2));
                }
            }
        }
    }
    return acc * s * s / 4.0;
}

Complex radial_mu(Point z) { return z == Complex(0) ? Complex(0) : (1.0 / 3) * z / std::conj(z); }

BeltramiField radial_field(double L, int n, double R)
{
    return truncate(field_from_function(GridSpec{L, n}, radial_mu, 1.0 / 3), R);
}

// Exact radial solution: w = z |z| inside B(0, R0), R0 z outside.
Complex radial_exact(Point z, double R0)
{
    return std::abs(z) <= R0 ? z * std::abs(z) : R0 * z;
}

} // namespace

TEST_CASE("pixel kernels match quadrature")
{
    const double h = 0.37;
    for (auto [mx, my] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {-1, 0}, {2, -3}, {-4, -1},
                                                            {7, 7}, {8, 0}, {-8, 5}, {12, -9}, {0, -30}}) {
        Complex s = beurling_weight(mx, my, h);
        Complex sq = -std::numbers::inv_pi *
                     pixel_quadrature([](Complex e) { return 1.0 / (e * e); }, mx, my, h);
        CHECK(std::abs(s - sq) <= 1e-9 * std::abs(sq));
        Complex c = cauchy_weight(mx, my, h);
        Complex cq = std::numbers::inv_pi * pixel_quadrature([](Complex e) { return 1.0 / e; }, mx, my, h);
        CHECK(std::abs(c - cq) <= 1e-9 * std::abs(cq));
    }
    CHECK(beurling_weight(0, 0, h) == Complex(0));
    CHECK(cauchy_weight(0, 0, h) == Complex(0));
}

TEST_CASE("transforms of a disk indicator")
{
    // C chi_D = conj z inside, r^2 / z outside; S chi_D = 0 inside, -r^2 / z^2 outside.
    GridSpec g{4, 256};
    const double r = 1.0;
    std::vector<Complex> chi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) chi[i] = std::abs(g.node(i)) < r ? 1.0 : 0.0;
    PlaneTransforms t(g);
    std::vector<Complex> s, c;
    t.beurling(chi, s);
    t.cauchy(chi, c);
    double h = g.spacing();
    double err_c = 0, err_s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        Point z = g.node(i);
        double d = std::abs(std::abs(z) - r);
        if (d < 4 * h) continue;
        Complex ce = std::abs(z) < r ? std::conj(z) : r * r / z;
        err_c = std::max(err_c, std::abs(c[i] - ce));
        if (std::abs(z.real()) < 2 && std::abs(z.imag()) < 2) {
            Complex se = std::abs(z) < r ? Complex(0) : -r * r / (z * z);
            err_s = std::max(err_s, std::abs(s[i] - se));
        }
    }
    CHECK(err_c < 5 * h);
    CHECK(err_s < 0.05);
}

TEST_CASE("identity oracle")
{
    GridSpec g{4, 256};
    auto t0 = std::chrono::steady_clock::now();
    auto m = solve_truncated(constant_field(g, 0.0));
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double err = 0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(m.w[i] - g.node(i)));
    CHECK(err <= 1e-10);
    CHECK(dt < 5.0);
    CHECK(m.normalized);
    CHECK(m.meta.converged);
    CHECK(evaluate(m, Complex(0.25, 0.5)) == Complex(0.25, 0.5));
}

TEST_CASE("radial oracle and map diagnostics")
{
    auto f = radial_field(8, 256, 4);
    auto m = solve_truncated(f);
    double err = 0, wmax = 0;
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        Point z = m.grid.node(i);
        if (std::abs(z) > 2) continue;
        Complex e = radial_exact(z, 4);
        err = std::max(err, std::abs(m.w[i] - e));
        wmax = std::max(wmax, std::abs(e));
    }
    CHECK(err / wmax <= 1e-2);
    // normalisation is exact
    CHECK(std::abs(evaluate(m, 0.0)) < 1e-14);
    CHECK(std::abs(evaluate(m, 1.0) - 1.0) < 1e-14);
    CHECK(m.meta.orientation_fraction == 1.0);
    CHECK(m.meta.residual_median < 1e-3);
    // geometric convergence at rate <= k in L2 (S is an L2 isometry, not a sup-norm contraction)
    for (std::size_t j = 1; j < m.meta.history_l2.size(); ++j) {
        if (m.meta.history_l2[j - 1] < 1e-13) break;
        CHECK(m.meta.history_l2[j] <= (1.0 / 3 + 0.01) * m.meta.history_l2[j - 1]);
    }
    // conformal outside the support: finite-difference dbar of O(h^2)
    auto stats = beltrami_residual(m, f);
    CHECK(stats.max_dbar_outside < 1e-3);
}

TEST_CASE("interpolation error is second order")
{
    double prev = 0;
    for (int n : {64, 128, 256}) {
        DiscreteMap m;
        m.grid = GridSpec{4, n};
        for (std::size_t i = 0; i < m.grid.size(); ++i) m.w.push_back(radial_exact(m.grid.node(i), 4));
        double err = 0;
        for (double t = 0.013; t < 2.0; t += 0.0917) {
            Point z = std::polar(1.5 * t, 7 * t);
            err = std::max(err, std::abs(evaluate(m, z) - radial_exact(z, 4)));
        }
        if (prev > 0) CHECK(err < prev / 3.0);
        prev = err;
        for (int j = 0; j < 10; ++j) {
            std::size_t i = (j * 7919) % m.grid.size();
            CHECK(evaluate(m, m.grid.node(i)) == m.w[i]);
        }
    }
    DiscreteMap m;
    m.grid = GridSpec{1, 8};
    m.w.assign(64, 0.0);
    CHECK_THROWS_AS(evaluate(m, Complex(2, 0)), PreconditionError);
}

TEST_CASE("inversion")
{
    GridSpec g{4, 64};
    auto id = solve_truncated(constant_field(g, 0.0));
    Point z = invert_at(id, Complex(1, 1), 0.0);
    CHECK(std::abs(z - Complex(1, 1)) < 1e-9);
    auto m = solve_truncated(radial_field(8, 256, 4));
    Point two = invert_at(m, 4.0, Complex(1.0, 0.5));
    CHECK(std::abs(two - 2.0) < 0.02);
    for (Complex t : {Complex(1, 2), Complex(-3, 0.5), Complex(0.1, -0.2)}) {
        Point p = invert_at(m, t, 0.0);
        CHECK(std::abs(evaluate(m, p) - t) <= 1e-10);
    }
    CHECK_THROWS_AS(invert_at(m, Complex(100, 0), 0.0), PreconditionError);
}

TEST_CASE("solver preconditions")
{
    GridSpec g{4, 64};
    CHECK_THROWS_AS(solve_truncated(constant_field(g, 0.2)), PreconditionError);  // support fills domain
    CHECK_THROWS_AS(solve_truncated(truncate(constant_field(g, 0.2), 3.0)), PreconditionError);
    auto ok = solve_truncated(truncate(constant_field(g, 0.2), 2.0));
    CHECK(ok.meta.converged);
}

TEST_CASE("constant coefficient on a disk agrees with the exact solution")
{
    // mu = k on B(0, r): w = z + k conj z inside, z + k r^2 / z outside (up to normalisation).
    const double k = 0.5, r = 2.0;
    auto f = truncate(constant_field(GridSpec{4, 256}, k), r);
    auto m = solve_truncated(f);
    auto raw = [&](Point z) { return std::abs(z) < r ? z + k * std::conj(z) : z + k * r * r / z; };
    Complex w0 = raw(0.0), w1 = raw(1.0);
    double err = 0;
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        Point z = m.grid.node(i);
        if (std::abs(std::abs(z) - r) < 0.1 || std::abs(z) > 3.5) continue;
        err = std::max(err, std::abs(m.w[i] - (raw(z) - w0) / (w1 - w0)));
    }
    CHECK(err < 1e-2);
}

TEST_CASE("limit along a radius ladder")
{
    GridSpec g{16, 256};
    auto zero = solve_limit(constant_field(g, 0.0), {2, 4, 8}, 1.5, 1e-8);
    CHECK(zero.converged);
    CHECK(zero.rung == 1);
    CHECK(zero.differences.front() < 1e-12);

    // compactly supported coefficient: rungs beyond the support agree
    auto compact = truncate(field_from_function(g, radial_mu, 1.0 / 3), 2.0);
    compact.truncation_radius.reset();
    auto lim = solve_limit(compact, {2, 4, 8}, 1.5, 1e-6);
    CHECK(lim.converged);
    CHECK(lim.differences.front() < 1e-6);

    // radial coefficient everywhere: differences on K shrink along the ladder
    auto full = field_from_function(g, radial_mu, 1.0 / 3);
    auto run = solve_limit(full, {2, 4, 8}, 1.5, 1e-12);
    CHECK_FALSE(run.converged);
    REQUIRE(run.differences.size() == 2);
    CHECK(run.differences[1] < run.differences[0]);
}

TEST_CASE("map dump round trip")
{
    auto m = solve_truncated(radial_field(4, 64, 2));
    auto stem = std::filesystem::temp_directory_path() / "rqc_map_test";
    write_map(stem, m);
    auto back = read_map(stem);
    CHECK(back.w == m.w);
    CHECK(back.meta.iterations == m.meta.iterations);
    CHECK(back.normalized);
}
