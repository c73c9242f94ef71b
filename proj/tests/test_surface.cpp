#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <tuple>

#include "rqc/errors.hpp"
#include "rqc/surface.hpp"

using namespace rqc;

namespace {

constexpr double pi = std::numbers::pi;

// Beltrami coefficient of f at z by central differences.
Complex fd_beltrami(const std::function<Complex(Point)>& f, Point z, double h)
{
    Complex dx = (f(z + h) - f(z - h)) / (2 * h);
    Complex dy = (f(z + Complex(0, h)) - f(z - Complex(0, h))) / (2 * h);
    Complex fz = 0.5 * (dx - Complex(0, 1) * dy);
    Complex fzb = 0.5 * (dx + Complex(0, 1) * dy);
    return fzb / fz;
}

SurfaceSample corner_sample(const SurfaceModel& model, const Rect& window)
{
    SurfaceModel base = model;
    auto law = corner_arc_law();
    base.laws = {law, law, law, law};
    return sample_surface(base, window, 0);
}

} // namespace

TEST_CASE("sector slopes")
{
    auto model = SurfaceModel::standard();
    auto m = model.midpoints;
    auto s = sector_slopes(model, m);
    for (double v : s) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    // marked point at the quarter of arc 1
    auto alpha = m;
    alpha[0] = 0.25 * (pi / 2);
    s = sector_slopes(model, alpha);
    CHECK(s[0] == doctest::Approx(0.5));
    CHECK(s[1] == doctest::Approx(1.5));

    // width-weighted average is 1 on every arc
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int t = 0; t < 20; ++t) {
        std::array<double, 4> a{};
        for (int q = 0; q < 4; ++q) a[q] = model.anchors[q] + u(gen) * pi / 2;
        s = sector_slopes(model, a);
        for (int q = 0; q < 4; ++q) {
            double w0 = m[q] - model.anchors[q];
            double w1 = model.anchors[q] + pi / 2 - m[q];
            CHECK(s[2 * q] > 0);
            CHECK((s[2 * q] * w0 + s[2 * q + 1] * w1) / (w0 + w1) == doctest::Approx(1.0));
        }
    }
    alpha[2] = pi / 2 + 0.1; // outside C_3
    CHECK_THROWS_AS(sector_slopes(model, alpha), PreconditionError);
}

TEST_CASE("sector coefficient")
{
    CHECK(std::abs(sector_beltrami(1.0, {0.3, 0.2})) == 0.0);
    CHECK(std::abs(sector_beltrami(3.0, {0.3, 0.2})) == doctest::Approx(0.5));
    CHECK(std::abs(sector_beltrami(3.0, {-0.01, 0.7})) == doctest::Approx(0.5));
    CHECK_THROWS_AS(sector_beltrami(0.0, {0.1, 0.1}), PreconditionError);
    CHECK_THROWS_AS(sector_beltrami(-1.0, {0.1, 0.1}), PreconditionError);

    // against differences of u -> |u| exp(i k(arg u)) with k(t) = t0 + s (t - t0)
    for (double s : {0.3, 0.8, 1.7, 4.0}) {
        auto phi = [s](Point u) { return std::polar(std::abs(u), 0.2 + s * (std::arg(u) - 0.2)); };
        for (Complex u : {Complex(0.4, 0.3), Complex(-0.2, 0.5), Complex(0.1, -0.6)}) {
            Complex want = sector_beltrami(s, u);
            Complex got = fd_beltrami(phi, u, 1e-6);
            CHECK(std::abs(got - want) < 1e-7);
        }
    }
}

TEST_CASE("sampling the marked points")
{
    auto model = SurfaceModel::standard();
    Rect window{-4, -4, 4, 4};
    auto base = corner_sample(model, window);
    for (auto j = base.j0; j <= base.j1; ++j) {
        for (auto i = base.i0; i <= base.i1; ++i) {
            CHECK(base.at(i, j) == model.midpoints[vertex_label(i, j) - 1]);
        }
    }
    auto a = sample_surface(model, window, 11);
    auto b = sample_surface(model, window, 11);
    CHECK(a.alpha == b.alpha);
    auto c = sample_surface(model, {-2, -2, 2, 2}, 11);
    for (auto j = c.j0; j <= c.j1; ++j)
        for (auto i = c.i0; i <= c.i1; ++i) CHECK(c.at(i, j) == a.at(i, j));
    CHECK(sample_surface(model, window, 12).alpha != a.alpha);

    SurfaceModel bad = model;
    bad.laws[1] = {"outside", [](KeyedRng&, double lo, double, double) { return lo - 0.1; }};
    CHECK_THROWS_AS(sample_surface(bad, window, 1), PreconditionError);

    auto js = a.to_json(model);
    CHECK(js["vertices"].size() == a.alpha.size());
    CHECK(model.to_json()["laws"].size() == 4);
}

TEST_CASE("marked points follow the arc law (Kolmogorov-Smirnov)")
{
    auto model = SurfaceModel::standard();
    auto s = sample_surface(model, {0, 0, 200, 200}, 2024);
    for (int label = 1; label <= 4; ++label) {
        int q = label - 1;
        double lo = model.anchors[q] + 0.1 * pi / 2;
        double hi = model.anchors[q] + 0.9 * pi / 2;
        std::vector<double> xs;
        for (auto j = s.j0; j <= s.j1; ++j)
            for (auto i = s.i0; i <= s.i1; ++i)
                if (vertex_label(i, j) == label) xs.push_back(s.at(i, j));
        REQUIRE(xs.size() >= 10000);
        std::sort(xs.begin(), xs.end());
        double n = static_cast<double>(xs.size()), d = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            double cdf = (xs[k] - lo) / (hi - lo);
            d = std::max({d, (k + 1) / n - cdf, cdf - k / n});
        }
        CHECK(d < 1.628 / std::sqrt(n)); // 1% critical value
    }
}

TEST_CASE("base surface has zero coefficient")
{
    auto model = SurfaceModel::standard();
    GridSpec g{4, 64};
    auto sample = corner_sample(model, {-4, -4, 4, 4});
    auto f = surface_beltrami(model, sample, g);
    CHECK(f.sup() < 1e-12);
    for (double v : f.region_sup) CHECK(v < 1e-12);
}

TEST_CASE("one perturbed vertex: constant modulus on its eight triangles")
{
    auto model = SurfaceModel::standard();
    Rect window{-4, -4, 4, 4};
    auto sample = corner_sample(model, window);
    const std::int64_t vi = 1, vj = 1; // label 2
    int q = vertex_label(vi, vj) - 1;
    double alpha = model.anchors[q] + 0.25 * pi / 2;
    sample.at(vi, vj) = alpha;
    auto a = model.midpoints;
    a[q] = alpha;
    auto s = sector_slopes(model, a);
    double k0 = std::abs(1 - s[2 * q]) / (1 + s[2 * q]);
    double k1 = std::abs(1 - s[2 * q + 1]) / (1 + s[2 * q + 1]);

    GridSpec g{4, 128};
    auto f = surface_beltrami(model, sample, g);
    SurfaceEvaluator eval(model, sample);
    std::set<std::tuple<std::int64_t, std::int64_t, int>> triangles;
    double worst = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto info = locate_sector(eval.map(), g.node(i));
        double mod = std::abs(f.samples[i]);
        if (info.vi == vi && info.vj == vj) {
            triangles.emplace(info.cx, info.cy, info.half);
            worst = std::max(worst, std::abs(mod - (info.half == 0 ? k0 : k1)));
        } else {
            worst = std::max(worst, mod);
        }
    }
    CHECK(triangles.size() == 8);
    CHECK(worst < 1e-6);
    CHECK(f.sup() <= std::max(k0, k1) + 1e-12);
}

TEST_CASE("finite-difference check of the composite coefficient")
{
    auto model = SurfaceModel::standard();
    auto sample = sample_surface(model, {-3, -3, 3, 3}, 77);
    SurfaceEvaluator eval(model, sample);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    int checked = 0;
    double worst = 0;
    while (checked < 20) {
        Point z(u(gen), u(gen));
        auto info = locate_sector(eval.map(), z);
        // interior of the triangle: a small disk around z stays in the same sector
        bool interior = true;
        for (int k = 0; k < 16 && interior; ++k) {
            auto other = locate_sector(eval.map(), z + std::polar(0.01, k * pi / 8));
            interior = other.cx == info.cx && other.cy == info.cy && other.label == info.label &&
                       other.half == info.half;
        }
        if (!interior || std::abs(info.disk.u) < 0.05) continue;
        Complex w0 = eval.sphere_value(z);
        bool invert = std::abs(w0) > 1;
        auto f = [&](Point p) {
            Complex w = eval.sphere_value(p);
            return invert ? 1.0 / w : w;
        };
        Complex fd = fd_beltrami(f, z, 1e-5);
        worst = std::max(worst, std::abs(fd - eval.beltrami(z)));
        ++checked;
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("boundary traces agree across cell edges")
{
    auto model = SurfaceModel::standard();
    auto sample = sample_surface(model, {-3, -3, 3, 3}, 5);
    SurfaceEvaluator eval(model, sample);
    double a = eval.map().cell_width(), b = eval.map().cell_height();
    auto cyc = [](double x, double y) {
        double d = std::fmod(std::abs(x - y), 2 * pi);
        return std::min(d, 2 * pi - d);
    };
    double worst = 0;
    for (std::int64_t cx = -2; cx < 2; ++cx) {
        for (std::int64_t cy = -2; cy < 2; ++cy) {
            for (int k = 1; k < 40; ++k) {
                double t = k / 40.0;
                Point v((cx + 1) * a, (cy + t) * b); // vertical edge
                worst = std::max(worst, cyc(eval.boundary_trace(v, cx, cy), eval.boundary_trace(v, cx + 1, cy)));
                Point h((cx + t) * a, (cy + 1) * b); // horizontal edge
                worst = std::max(worst, cyc(eval.boundary_trace(h, cx, cy), eval.boundary_trace(h, cx, cy + 1)));
            }
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("each cell covers a hemisphere of spherical area 1/2")
{
    auto model = SurfaceModel::standard();
    for (std::uint64_t seed : {0ULL, 9ULL}) {
        auto sample = seed == 0 ? corner_sample(model, {-2, -2, 2, 2}) : sample_surface(model, {-2, -2, 2, 2}, seed);
        SurfaceEvaluator eval(model, sample);
        double a = eval.map().cell_width(), b = eval.map().cell_height();
        const int n = 200;
        for (auto [cx, cy] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{-1, 1}}) {
            double sum = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    sum += eval.spherical_density({(cx + (i + 0.5) / n) * a, (cy + (j + 0.5) / n) * b});
            sum *= a * b / (n * n);
            CHECK(sum == doctest::Approx(0.5).epsilon(2e-3));
        }
    }
}

TEST_CASE("surface field regions and bounds")
{
    auto model = SurfaceModel::standard();
    auto sample = sample_surface(model, {-4, -4, 4, 4}, 31);
    GridSpec g{4, 64};
    auto f = surface_beltrami(model, sample, g);
    CHECK(f.sup() < 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(f.samples[i]) <= f.region_sup[f.region_of_node[i]] + 1e-9);
    }
    // default law keeps the marked point in the middle 80%: slopes in [0.2, 1.8]
    CHECK(f.bound() <= 0.8 / 1.2 + 1e-12);
    SurfaceSample small = sample_surface(model, {-1, -1, 1, 1}, 31);
    CHECK_THROWS_AS(surface_beltrami(model, small, g), PreconditionError);
}

TEST_CASE("truncated surface field matches truncate")
{
    auto model = SurfaceModel::standard();
    GridSpec g{4, 64};
    auto full = surface_beltrami(model, sample_surface(model, {-4, -4, 4, 4}, 3), g);
    auto small = sample_surface(model, {-2, -2, 2, 2}, 3);
    auto t = surface_beltrami(model, small, g, 2.0);
    auto ref = truncate(full, 2.0);
    CHECK(t.samples == ref.samples);
    CHECK(t.truncation_radius == 2.0);
}
