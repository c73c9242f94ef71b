#include "rqc/asymptotics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "rqc/errors.hpp"
#include "rqc/rng.hpp"
#include "rqc/stats.hpp"

namespace rqc {

namespace {

struct CircleImage {
    double min_abs = 0.0;
    int winding = 0;
};

CircleImage circle_image(const DiscreteMap& map, double radius, double scale, int count = 4096)
{
    CircleImage out;
    out.min_abs = std::numeric_limits<double>::infinity();
    double total = 0;
    Complex prev = scale * evaluate(map, radius);
    for (int k = 1; k <= count; ++k) {
        Complex w = scale * evaluate(map, std::polar(radius, 2 * std::numbers::pi * k / count));
        out.min_abs = std::min(out.min_abs, std::abs(w));
        total += std::arg(w / prev);
        prev = w;
    }
    out.winding = static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
    return out;
}

double valid_radius(const DiscreteMap& map)
{
    double r = map.grid.upper();
    if (map.meta.truncation_radius) r = std::min(r, *map.meta.truncation_radius);
    return r;
}

} // namespace

Complex LinearMapEstimate::apply(Point z) const
{
    return {matrix[0] * z.real() + matrix[1] * z.imag(), matrix[2] * z.real() + matrix[3] * z.imag()};
}

std::vector<Point> disk_samples(double R, int count)
{
    require(R > 0 && count >= 1, "disk samples need R > 0 and a positive count");
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        double rho = R * std::sqrt((k + 0.5) / count);
        pts.push_back(std::polar(rho, golden * k));
    }
    return pts;
}

LinearMapEstimate estimate_linear_map(const DiscreteMap& map, double R, int samples)
{
    require(R > 0 && R <= map.grid.upper(), "B(0, R) must lie in the map domain");
    auto pts = disk_samples(R, samples);
    std::vector<Complex> w;
    w.reserve(pts.size());
    double sxx = 0, sxy = 0, syy = 0, xu = 0, yu = 0, xv = 0, yv = 0;
    for (Point z : pts) {
        Complex v = evaluate(map, z);
        w.push_back(v);
        double x = z.real(), y = z.imag();
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        xu += x * v.real();
        yu += y * v.real();
        xv += x * v.imag();
        yv += y * v.imag();
    }
    double det = sxx * syy - sxy * sxy;
    if (!(det > 1e-12 * (sxx + syy) * (sxx + syy))) throw PreconditionError("degenerate sample set");
    LinearMapEstimate est;
    est.R = R;
    est.samples = pts.size();
    est.matrix = {(syy * xu - sxy * yu) / det, (sxx * yu - sxy * xu) / det, (syy * xv - sxy * yv) / det,
                  (sxx * yv - sxy * xv) / det};
    double dev = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) dev = std::max(dev, std::abs(w[i] - est.apply(pts[i])));
    est.deviation = dev / R;
    return est;
}

DiscreteMap map_from_function(const GridSpec& grid, const std::function<Complex(Point)>& w)
{
    grid.validate();
    DiscreteMap m;
    m.grid = grid;
    m.w.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) m.w[i] = w(grid.node(i));
    return m;
}

std::vector<DeviationRow> deviation_curve(const SurfaceModel& model, const std::vector<double>& ladder,
                                          int trials, std::uint64_t seed, const DeviationOptions& options)
{
    require(trials >= 5, "at least 5 trials per radius");
    require(!ladder.empty(), "radius ladder must be nonempty");
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        require(ladder[k] > 0 && (k == 0 || ladder[k] > ladder[k - 1]), "radius ladder must increase");
    }
    const double a = model.cell_width;
    std::vector<DeviationRow> rows;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        const double R = ladder[k];
        double want = 4 * R * options.pixels_per_cell / a;
        int n = static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::ceil(want))));
        n = std::clamp(n, options.min_n, options.max_n);
        DeviationRow row;
        row.R = R;
        row.grid = {2 * R, n};
        std::array<double, 4> sum{};
        for (int t = 0; t < trials; ++t) {
            std::uint64_t s = derive_seed(derive_seed(seed, k), static_cast<std::uint64_t>(t));
            row.seeds.push_back(s);
            try {
                auto sample = sample_surface(model, {-R - a, -R - a, R + a, R + a}, s);
                auto field = surface_beltrami(model, sample, row.grid, R);
                auto map = solve_truncated(field, {options.tol, 500, false});
                auto est = estimate_linear_map(map, R, options.samples);
                row.deviations.push_back(est.deviation);
                for (int i = 0; i < 4; ++i) sum[i] += est.matrix[i];
            } catch (const NumericalError&) {
                ++row.failures;
            }
        }
        if (!row.deviations.empty()) {
            auto sorted = row.deviations;
            std::sort(sorted.begin(), sorted.end());
            row.median = quantile_sorted(sorted, 0.5);
            row.q25 = quantile_sorted(sorted, 0.25);
            row.q75 = quantile_sorted(sorted, 0.75);
            row.min = sorted.front();
            row.max = sorted.back();
            for (int i = 0; i < 4; ++i) row.mean_matrix[i] = sum[i] / static_cast<double>(sorted.size());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

AreaTable spherical_area(const SurfaceModel& model, const SurfaceSample& sample, const DiscreteMap& map,
                         const std::vector<double>& t_values, double scale)
{
    require(!t_values.empty(), "t values are required");
    require(scale > 0, "scale must be positive");
    for (std::size_t k = 0; k < t_values.size(); ++k) {
        require(t_values[k] > 0 && (k == 0 || t_values[k] > t_values[k - 1]), "t values must increase");
    }
    const double tmax = t_values.back();
    AreaTable out;
    out.t = t_values;
    out.scale = scale;
    out.valid_radius = valid_radius(map);
    auto ring = circle_image(map, out.valid_radius, scale);
    out.boundary_min = ring.min_abs;
    if (ring.winding != 1 || !(ring.min_abs > tmax)) {
        throw PreconditionError("map image does not cover B(0, max t)");
    }
    SurfaceEvaluator eval(model, sample);
    const double cell = map.grid.spacing() * map.grid.spacing();
    std::vector<std::pair<double, double>> nodes;  // (|w|, area)
    for (std::size_t i = 0; i < map.grid.size(); ++i) {
        Point z = map.grid.node(i);
        if (std::abs(z) >= out.valid_radius) continue;
        double r = std::abs(scale * map.w[i]);
        if (r >= tmax) continue;
        nodes.emplace_back(r, eval.spherical_density(z) * cell);
    }
    std::sort(nodes.begin(), nodes.end());
    out.A.reserve(t_values.size());
    double acc = 0;
    std::size_t j = 0;
    for (double t : t_values) {
        while (j < nodes.size() && nodes[j].first < t) acc += nodes[j++].second;
        out.A.push_back(acc);
    }
    return out;
}

CharacteristicTable characteristic(const std::vector<double>& t, const std::vector<double>& A)
{
    require(t.size() == A.size() && !t.empty(), "t and A tables must match");
    for (std::size_t k = 0; k < t.size(); ++k) {
        require(t[k] > 0 && (k == 0 || t[k] > t[k - 1]), "t values must increase");
        require(A[k] >= 0 && (k == 0 || A[k] >= A[k - 1]), "A table must be monotone");
    }
    CharacteristicTable out;
    out.r = t;
    out.T.resize(t.size());
    out.error.assign(t.size(), 0.0);
    out.T[0] = 0.5 * A[0];
    for (std::size_t k = 1; k < t.size(); ++k) {
        out.T[k] = out.T[k - 1] + 0.5 * (A[k] + A[k - 1]) * std::log(t[k] / t[k - 1]);
    }
    double coarse = out.T[0];
    for (std::size_t k = 2; k < t.size(); k += 2) {
        coarse += 0.5 * (A[k] + A[k - 2]) * std::log(t[k] / t[k - 2]);
        out.error[k] = std::abs(out.T[k] - coarse) / 3.0;
    }
    for (std::size_t k = 1; k < t.size(); k += 2) {
        out.error[k] = std::max(out.error[k - 1], k + 1 < t.size() ? out.error[k + 1] : 0.0);
    }
    return out;
}

OrderFit order_fit(const std::vector<double>& r, const std::vector<double>& T, double r0, double r1)
{
    require(r.size() == T.size(), "r and T tables must match");
    require(r0 > 0 && r1 > r0, "fit window must satisfy 0 < r0 < r1");
    std::vector<double> x, y;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (r[k] >= r0 * (1 - 1e-12) && r[k] <= r1 * (1 + 1e-12) && T[k] > 0) {
            x.push_back(std::log(r[k]));
            y.push_back(std::log(T[k]));
        }
    }
    const int m = static_cast<int>(x.size());
    if (m < 6) throw PreconditionError("fit window holds fewer than 6 points");
    double mx = 0, my = 0;
    for (int i = 0; i < m; ++i) {
        mx += x[i] / m;
        my += y[i] / m;
    }
    double sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    OrderFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (int i = 0; i < m; ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / m);
    const int q = std::max(2, m / 3);
    f.lower_slope = std::numeric_limits<double>::infinity();
    f.upper_slope = -std::numeric_limits<double>::infinity();
    for (int i = 0; i + q - 1 < m; ++i) {
        double s = (y[i + q - 1] - y[i]) / (x[i + q - 1] - x[i]);
        f.lower_slope = std::min(f.lower_slope, s);
        f.upper_slope = std::max(f.upper_slope, s);
    }
    f.r0 = r0;
    f.r1 = r1;
    f.points = m;
    return f;
}

OrderRun order_run(const SurfaceModel& model, std::uint64_t seed, const OrderOptions& options)
{
    require(options.r_max > options.r_min && options.r_min > options.t_min && options.t_min > 0,
            "need 0 < t_min < r_min < r_max");
    require(options.truncation_factor > 1, "truncation factor must exceed 1");
    const double a = model.cell_width;
    const double rmax = options.r_max * a;
    const double Rt = options.truncation_factor * rmax;
    OrderRun run;
    run.seed = seed;
    run.grid = {2 * Rt, options.n};
    auto sample = sample_surface(model, {-Rt - a, -Rt - a, Rt + a, Rt + a}, seed);
    auto field = surface_beltrami(model, sample, run.grid, Rt);
    auto map = solve_truncated(field, {options.tol, 500, false});
    run.iterations = map.meta.iterations;
    auto ring = circle_image(map, valid_radius(map), 1.0);
    double scale = 1.0;
    if (ring.min_abs < 1.01 * rmax) scale = 1.01 * rmax / ring.min_abs;
    std::vector<double> t;
    const double t0 = options.t_min * a;
    for (int k = 0; k < options.t_count; ++k) {
        t.push_back(t0 * std::pow(rmax / t0, static_cast<double>(k) / (options.t_count - 1)));
    }
    t.back() = rmax;
    run.area = spherical_area(model, sample, map, t, scale);
    run.T = characteristic(run.area.t, run.area.A);
    run.fit = order_fit(run.T.r, run.T.T, options.r_min * a, rmax);
    return run;
}

} // namespace rqc
