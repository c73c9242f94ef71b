#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rqc/beltrami.hpp"
#include "rqc/errors.hpp"

using namespace rqc;

TEST_CASE("point mass laws")
{
    auto part = build_square_grid(1, 1, {-4, -4, 4, 4});
    GridSpec g{4, 32};
    auto zero = sample_field(part, {point_mass_law(0.0)}, g, 1);
    CHECK(zero.sup() == 0.0);
    auto c = sample_field(part, {point_mass_law(0.3)}, g, 1);
    for (Complex v : c.samples) CHECK(v == Complex(0.3));
    for (double s : c.region_sup) CHECK(s == 0.3);
    CHECK(c.regions.size() == 64);
    CHECK(c.dilatation() == doctest::Approx(13.0 / 7.0));
}

TEST_CASE("sampling is deterministic and order independent")
{
    auto part = build_square_grid(0.5, 0.5, {-2, -2, 2, 2});
    GridSpec g{2, 64};
    auto a = sample_field(part, {uniform_modulus_law(0, 0.8)}, g, 99);
    auto b = sample_field(part, {uniform_modulus_law(0, 0.8)}, g, 99);
    CHECK(a.samples == b.samples);
    // A smaller grid over a subwindow reproduces the same per-region draws.
    GridSpec small{1, 32};
    auto c = sample_field(part, {uniform_modulus_law(0, 0.8)}, small, 99);
    for (int iy = 0; iy < 32; ++iy) {
        for (int ix = 0; ix < 32; ++ix) {
            Point z = small.node(ix, iy);
            CHECK(c.samples[small.index(ix, iy)] == a.samples[g.nearest(z)]);
        }
    }
    auto d = sample_field(part, {uniform_modulus_law(0, 0.8)}, g, 100);
    CHECK(d.samples != a.samples);
    // every sample respects its region bound
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(std::abs(a.samples[i]) <= a.region_sup[a.region_of_node[i]] + 1e-12);
    }
    CHECK_THROWS_AS(sample_field(part, {}, g, 1), PreconditionError);
    CHECK_THROWS_AS(sample_field(part, {point_mass_law(0)}, GridSpec{8, 16}, 1), PreconditionError);
    CHECK_THROWS_AS(sample_field(part, {point_mass_law(0)}, g, 1, 100), PreconditionError);
}

TEST_CASE("periodic in distribution")
{
    // Mean |mu| over two disjoint families of translates agrees within 3 sigma.
    auto law = uniform_modulus_law(0.1, 0.7);
    double sa = 0, sb = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        RegionId a{i, 0, 0}, b{i, 7, 0};
        KeyedRng ra(5, Stream::field, a.cx, a.cy, a.local);
        KeyedRng rb(5, Stream::field, b.cx, b.cy, b.local);
        sa += law.sample(a, ra).sup;
        sb += law.sample(b, rb).sup;
    }
    double sd = 0.6 / std::sqrt(12.0);
    CHECK(std::abs(sa / n - sb / n) < 3 * sd * std::sqrt(2.0 / n));
}

TEST_CASE("truncation")
{
    GridSpec g{4, 32};
    auto f = constant_field(g, 0.3);
    auto t = truncate(f, 1.0);
    CHECK(t.samples[g.index(24, 16)] == Complex(0.0));  // z = 2
    CHECK(t.samples[g.index(16, 16)] == Complex(0.3));  // z = 0
    CHECK(t.sup() <= f.sup());
    CHECK(truncate(constant_field(g, 0.0), 2.0).sup() == 0.0);
    CHECK(*t.truncation_radius == 1.0);
}

TEST_CASE("rescaling")
{
    auto part = build_square_grid(1, 1, {-4, -4, 4, 4});
    GridSpec g{4, 64};
    auto f = sample_field(part, {uniform_modulus_law(0, 0.5)}, g, 3);
    auto same = rescale(f, 1.0);
    CHECK(same.samples == f.samples);
    CHECK(same.grid == f.grid);
    auto half = rescale(f, 0.5);
    CHECK(half.grid.half_width == 2.0);
    auto back = rescale(half, 2.0);
    CHECK(back.samples == f.samples);
    CHECK(back.grid == f.grid);
    // resampled version: value at delta z equals value at z
    auto r = rescale_to(f, 0.5, GridSpec{2, 64});
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        CHECK(r.samples[i] == f.samples[f.grid.nearest(r.grid.node(i) / 0.5)]);
    }
    auto rr = rescale_to(r, 2.0, GridSpec{4, 64});
    CHECK(rr.samples == f.samples);
    CHECK_THROWS_AS(rescale_to(f, 0.5, GridSpec{4, 64}), PreconditionError);
    auto c = rescale(constant_field(g, 0.2), 0.25);
    for (Complex v : c.samples) CHECK(v == Complex(0.2));
}

TEST_CASE("conformal pullback")
{
    auto part = build_square_grid(1, 1, {-4, -4, 4, 4});
    GridSpec g{4, 32};
    auto f = sample_field(part, {uniform_modulus_law(0.2, 0.6)}, g, 4);
    auto id = pullback_conformal(f, [](Point z) { return z; }, [](Point) { return Complex(1); });
    CHECK(id.samples == f.samples);
    // g(z) = e^{i theta} z / 2 multiplies values by e^{-2 i theta}
    for (double theta : {0.3, std::numbers::pi / 2, 2.0}) {
        Complex rot = std::polar(0.5, theta);
        auto r = pullback_conformal(
            f, [rot](Point z) { return rot * z; }, [rot](Point) { return rot; });
        for (std::size_t i = 0; i < g.size(); ++i) {
            Point z = g.node(i);
            Complex src = f.samples[g.nearest(rot * z)];
            Complex got = r.samples[i];
            CHECK(std::abs(got - src * std::polar(1.0, -2 * theta)) < 1e-15);
            CHECK(std::abs(std::abs(got) - std::abs(src)) < 1e-15);
        }
    }
    CHECK_THROWS_AS(pullback_conformal(f, [](Point z) { return z; }, [](Point) { return Complex(0); }),
                    NumericalError);
}

TEST_CASE("probabilistic bound estimate")
{
    auto pm = probabilistic_bound_estimate({point_mass_law(0.3)}, 0.1, 200, 1);
    CHECK(pm.k == doctest::Approx(0.3));
    CHECK(pm.K == doctest::Approx(13.0 / 7.0));
    auto two = probabilistic_bound_estimate({discrete_law({0.1, 0.9})}, 0.6, 1000, 2);
    CHECK(two.k == doctest::Approx(0.1));
    double prev = 0;
    for (double eps : {0.9, 0.5, 0.2, 0.05, 0.01}) {
        auto e = probabilistic_bound_estimate({uniform_modulus_law(0, 0.9), point_mass_law(0.2)},
                                              eps, 500, 3);
        CHECK(e.k >= prev);
        prev = e.k;
    }
    RegionLaw bad{"bad", [](const RegionId&, KeyedRng&) {
                      return LawDraw{[](Point) { return Complex(1.0); }, 1.0};
                  }};
    CHECK_THROWS_AS(probabilistic_bound_estimate({bad}, 0.1, 100, 1), NumericalError);
    CHECK_THROWS_AS(probabilistic_bound_estimate({point_mass_law(0)}, 0.1, 10, 1), PreconditionError);
}

TEST_CASE("truncated normal law")
{
    auto law = truncated_normal_law(0.2, 0.3, 0.6);
    for (int i = 0; i < 500; ++i) {
        KeyedRng rng(1, Stream::field, i);
        auto d = law.sample({i, 0, 0}, rng);
        CHECK(d.sup <= 0.6);
        CHECK(std::abs(d.coefficient(0)) == d.sup);
    }
}

TEST_CASE("field dump round trip")
{
    auto part = build_square_grid(1, 1, {-2, -2, 2, 2});
    auto f = sample_field(part, {uniform_modulus_law(0, 0.5)}, GridSpec{2, 16}, 8);
    auto stem = std::filesystem::temp_directory_path() / "rqc_field_test";
    write_field(stem, f);
    auto back = read_field(stem);
    CHECK(back.samples == f.samples);
    CHECK(back.patch == f.patch);
    CHECK(back.region_sup == f.region_sup);
    CHECK(back.regions == f.regions);
    CHECK(back.seed == 8);
}
