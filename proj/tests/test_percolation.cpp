#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "rqc/errors.hpp"
#include "rqc/percolation.hpp"
#include "rqc/rng.hpp"

using namespace rqc;

namespace {

Polygon regular_polygon(Point c, double r, int n)
{
    std::vector<Point> v;
    for (int k = 0; k < n; ++k) v.push_back(c + std::polar(r, 2 * std::numbers::pi * k / n));
    return Polygon(v);
}

std::vector<Point> random_points(const Rect& box, int n, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ux(box.x0, box.x1), uy(box.y0, box.y1);
    std::vector<Point> out;
    for (int i = 0; i < n; ++i) out.emplace_back(ux(gen), uy(gen));
    return out;
}

} // namespace

TEST_CASE("coloring marginals")
{
    auto part = build_square_grid(1, 1, {-50, -50, 50, 50});
    auto blue = color(part, {0.0}, 0.0, 1);
    CHECK(blue.yellow_count() == 0);
    auto yellow = color(part, {1.0}, 1.0, 1);
    CHECK(yellow.yellow_count() == part.regions().size());

    auto c = color(part, {0.3}, 0.3, 7);
    REQUIRE(c.regions().size() == 10000);
    CHECK(std::abs(c.yellow_fraction() - 0.3) <= 0.015);
    auto again = color(part, {0.3}, 0.3, 7);
    CHECK(again.yellow_regions() == c.yellow_regions());
    CHECK(color(part, {0.3}, 0.3, 8).yellow_regions() != c.yellow_regions());

    CHECK_THROWS_AS(color(part, {0.4}, 0.3, 1), PreconditionError);
    CHECK_THROWS_AS(color(part, {0.1, 0.1}, 0.3, 1), PreconditionError);
}

TEST_CASE("lattice chemical distance examples")
{
    auto part = build_square_grid(1, 1, {-8, -8, 8, 8});
    auto blue = color(part, {0.0}, 0.0, 1);
    auto d = chemical_distance(blue, 0.0, 3.0, 8);
    CHECK(std::abs(d.value - 3.0) <= 0.02 * 3.0);
    CHECK(d.value <= 3.0 + d.slack);
    auto yellow = color(part, {1.0}, 1.0, 1);
    CHECK(chemical_distance(yellow, 0.0, 3.0, 8).value == 0.0);
    CHECK_THROWS_AS(chemical_distance(blue, 0.0, 3.0, 4), PreconditionError);

    // diagonal direction: 8-connected moves are exact along the diagonal too
    auto none = [](Point) { return false; };
    auto diag = lattice_chemical_distance(none, {-8, -8, 8, 8}, {-3, -3}, {3, 3}, 0.125);
    CHECK(diag.value == doctest::Approx(6 * std::sqrt(2.0)).epsilon(1e-12));
    // worst direction shows the anisotropy
    auto skew = chemical_distance(blue, {-4, -4 * (std::sqrt(2.0) - 1)}, {4, 4 * (std::sqrt(2.0) - 1)}, 16);
    double e = std::abs(Point(8, 8 * (std::sqrt(2.0) - 1)));
    CHECK(skew.value / e == doctest::Approx(1 + lattice_anisotropy()).epsilon(1e-2));
    CHECK(skew.value <= e + skew.slack);
}

TEST_CASE("yellow unit disk between the endpoints")
{
    auto disk = [](Point p) { return std::abs(p) <= 1.0; };
    auto lat = lattice_chemical_distance(disk, {-4, -4, 4, 4}, {-2, 0}, {2, 0}, 1.0 / 64);
    CHECK(std::abs(lat.value - 2.0) <= 0.02);
    ChemicalMetric exact({regular_polygon(0.0, 1.0, 512)});
    CHECK(exact({-2, 0}, {2, 0}) == doctest::Approx(2.0).epsilon(1e-4));
    // both endpoints inside yellow sets joined by a gap
    ChemicalMetric two({regular_polygon(-2.0, 0.5, 64), regular_polygon(2.0, 0.5, 64)});
    CHECK(two(-2.0, 2.0) == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("exact metric agrees with the lattice route")
{
    auto part = build_square_grid(1, 1, {-12, -12, 12, 12});
    for (double r : {0.1, 0.3, 0.5}) {
        auto col = color(part, {r}, r, 99);
        ChemicalMetric metric(col);
        auto pts = random_points({-10, -10, 10, 10}, 12, 5);
        for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
            double ex = metric(pts[i], pts[i + 1]);
            auto lat = chemical_distance(col, pts[i], pts[i + 1], 16);
            double d = std::abs(pts[i] - pts[i + 1]);
            CHECK(ex <= d + 1e-12);
            CHECK(lat.value <= ex + lat.slack);
            CHECK(ex <= lat.value + 0.05 * d + 4 * lat.spacing);
        }
    }
}

TEST_CASE("exact metric on the vertex-sector partition")
{
    auto part = build_vertex_sector_partition(1, 0, {0, std::numbers::pi / 2, std::numbers::pi, 1.5 * std::numbers::pi},
                                              {-6, -6, 6, 6}, 8);
    auto col = color(part, {0.3}, 0.3, 4);
    ChemicalMetric metric(col);
    auto pts = random_points({-4, -4, 4, 4}, 6, 9);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        double ex = metric(pts[i], pts[i + 1]);
        auto lat = chemical_distance(col, pts[i], pts[i + 1], 8);
        double d = std::abs(pts[i] - pts[i + 1]);
        CHECK(ex <= d + 1e-12);
        CHECK(lat.value <= ex + lat.slack);
        CHECK(ex <= lat.value + 0.05 * d + 4 * lat.spacing);
    }
}

TEST_CASE("pseudometric properties and coupling monotonicity")
{
    auto part = build_square_grid(1, 1, {-20, -20, 20, 20});
    auto col = color(part, {0.25}, 0.25, 3);
    ChemicalMetric metric(col);
    auto pts = random_points({-18, -18, 18, 18}, 10, 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(metric(pts[i], pts[i]) == 0.0);
        for (std::size_t j = 0; j < pts.size(); ++j) {
            double dij = metric(pts[i], pts[j]);
            CHECK(dij == doctest::Approx(metric(pts[j], pts[i])).epsilon(1e-13));
            CHECK(dij <= std::abs(pts[i] - pts[j]) + 1e-12);
            for (std::size_t k = 0; k < pts.size(); ++k) {
                CHECK(dij <= metric(pts[i], pts[k]) + metric(pts[k], pts[j]) + 1e-12);
            }
        }
    }
    // lattice symmetry
    auto a = chemical_distance(col, pts[0], pts[1], 8);
    auto b = chemical_distance(col, pts[1], pts[0], 8);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-13));

    // flipping blue regions to yellow never increases any distance
    auto more = col;
    KeyedRng rng(1, Stream::generic);
    std::vector<double> before;
    for (std::size_t i = 1; i < pts.size(); ++i) before.push_back(metric(pts[0], pts[i]));
    auto lat_before = chemical_distance(col, pts[0], pts[5], 8);
    for (const auto& id : more.regions())
        if (rng.uniform() < 0.1) more.set_yellow(id, true);
    ChemicalMetric bigger(more);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(bigger(pts[0], pts[i]) <= before[i - 1] + 1e-12);
    CHECK(chemical_distance(more, pts[0], pts[5], 8).value <= lat_before.value + 1e-12);
}

TEST_CASE("ratio experiment")
{
    auto part = build_square_grid(1, 1, {-20, -20, 20, 20});
    auto zero = ratio_experiment(part, 0.0, 16, 40, 8, 1, {.colorings = 2, .sources = 4, .lattice_checks = 1, .keep_rows = true});
    CHECK(zero.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zero.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zero.rows.size() == 80);
    CHECK(zero.fraction_min_ok == 1.0);
    CHECK(zero.lattice_checked == 2);
    CHECK(zero.lattice_max_excess <= lattice_anisotropy() + 0.05);
    for (const auto& row : zero.rows) CHECK(row.d >= std::log(16.0));

    auto st = ratio_experiment(part, 0.2, 16, 30, 8, 2, {.colorings = 3, .sources = 3});
    CHECK(st.max_ratio <= 1.0 + 1e-12);
    CHECK(st.min_ratio > 0.0);
    CHECK(st.q05 <= st.median);
    CHECK(st.coloring_min.size() == 3);
    CHECK_THROWS_AS(ratio_experiment(part, 0.1, 32, 10, 8, 1), PreconditionError);
}

TEST_CASE("insularity fraction")
{
    auto part = build_square_grid(1, 1, {-15, -15, 15, 15});
    CHECK(insularity_fraction(color(part, {0.0}, 0.0, 1), 0.5) == 1.0);
    CHECK(insularity_fraction(color(part, {1.0}, 1.0, 1), 0.5) == 0.0);

    // radius 0.5 around a unit square reaches the 3x3 block of cells
    const double r = 0.1;
    const int n = 30;
    double expected = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int k = (std::min(i + 1, n - 1) - std::max(i - 1, 0) + 1) * (std::min(j + 1, n - 1) - std::max(j - 1, 0) + 1);
            expected += std::pow(1 - r, k);
        }
    }
    expected /= n * n;
    CHECK(expected >= std::pow(1 - r, 9));
    const int trials = 20;
    std::vector<double> f;
    for (int t = 0; t < trials; ++t) f.push_back(insularity_fraction(color(part, {r}, r, 100 + t), 0.5));
    double mean = 0, var = 0;
    for (double v : f) mean += v / trials;
    for (double v : f) var += (v - mean) * (v - mean) / (trials - 1);
    CHECK(std::abs(mean - expected) <= 3 * std::sqrt(var / trials));
    CHECK(mean >= std::pow(1 - r, 9) - 3 * std::sqrt(var / trials));
}
