#include "rqc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rqc/errors.hpp"
#include "rqc/transforms.hpp"

namespace rqc {

namespace {

double support_extent(const BeltramiField& f)
{
    double r = 0.0;
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        if (f.samples[i] != Complex(0.0)) {
            Point z = f.grid.node(i);
            r = std::max({r, std::abs(z.real()), std::abs(z.imag())});
        }
    }
    return r;
}

double median_of(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double hi = *mid;
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

struct Derivs {
    Complex dz, dzbar;
};

Derivs central(const DiscreteMap& m, int ix, int iy)
{
    const auto& g = m.grid;
    double h = g.spacing();
    Complex wx = (m.w[g.index(ix + 1, iy)] - m.w[g.index(ix - 1, iy)]) / (2 * h);
    Complex wy = (m.w[g.index(ix, iy + 1)] - m.w[g.index(ix, iy - 1)]) / (2 * h);
    const Complex i(0, 1);
    return {0.5 * (wx - i * wy), 0.5 * (wx + i * wy)};
}

struct Cell {
    int i0, j0;
    double tx, ty;
};

Cell locate(const GridSpec& g, Point z)
{
    auto [fx, fy] = grid_coords(g, z);
    const double tol = 1e-9;
    if (!(fx >= -tol && fy >= -tol && fx <= g.n - 1 + tol && fy <= g.n - 1 + tol)) {
        throw PreconditionError("point outside the map domain");
    }
    fx = std::clamp(fx, 0.0, g.n - 1.0);
    fy = std::clamp(fy, 0.0, g.n - 1.0);
    int i0 = std::min(static_cast<int>(std::floor(fx)), g.n - 2);
    int j0 = std::min(static_cast<int>(std::floor(fy)), g.n - 2);
    return {i0, j0, fx - i0, fy - j0};
}

// Value and partial derivatives of the bilinear interpolant.
void bilinear(const DiscreteMap& m, Point z, Complex& w, Complex& wx, Complex& wy)
{
    const auto& g = m.grid;
    Cell c = locate(g, z);
    Complex a = m.w[g.index(c.i0, c.j0)];
    Complex b = m.w[g.index(c.i0 + 1, c.j0)];
    Complex d = m.w[g.index(c.i0, c.j0 + 1)];
    Complex e = m.w[g.index(c.i0 + 1, c.j0 + 1)];
    w = a * (1 - c.tx) * (1 - c.ty) + b * c.tx * (1 - c.ty) + d * (1 - c.tx) * c.ty + e * c.tx * c.ty;
    double h = g.spacing();
    wx = ((b - a) * (1 - c.ty) + (e - d) * c.ty) / h;
    wy = ((d - a) * (1 - c.tx) + (e - b) * c.tx) / h;
}

bool in_domain(const GridSpec& g, Point z)
{
    auto [fx, fy] = grid_coords(g, z);
    return fx >= 0 && fy >= 0 && fx <= g.n - 1 && fy <= g.n - 1;
}

Point clamp_to_domain(const GridSpec& g, Point z)
{
    double lo = -g.half_width, hi = g.upper();
    return {std::clamp(z.real(), lo, hi), std::clamp(z.imag(), lo, hi)};
}

bool newton(const DiscreteMap& m, Complex target, Point& z, double tol)
{
    Complex w, wx, wy;
    bilinear(m, z, w, wx, wy);
    double err = std::abs(w - target);
    for (int it = 0; it < 100; ++it) {
        if (err <= tol) return true;
        // Solve [Re wx Re wy; Im wx Im wy] [dx dy]^T = target - w.
        double a = wx.real(), b = wy.real(), c = wx.imag(), d = wy.imag();
        double det = a * d - b * c;
        if (!(std::abs(det) > 0)) return false;
        Complex r = target - w;
        double dx = (d * r.real() - b * r.imag()) / det;
        double dy = (-c * r.real() + a * r.imag()) / det;
        double step = 1.0;
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            Point trial = clamp_to_domain(m.grid, z + step * Complex(dx, dy));
            Complex wt, tx, ty;
            bilinear(m, trial, wt, tx, ty);
            double e = std::abs(wt - target);
            if (e < err) {
                z = trial;
                w = wt;
                wx = tx;
                wy = ty;
                err = e;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) return err <= tol;
    }
    return err <= tol;
}

} // namespace

BeltramiField crop(const BeltramiField& field, double half_width)
{
    const auto& g = field.grid;
    double h = g.spacing();
    int m = static_cast<int>(std::ceil(half_width / h - 1e-9));
    m = std::max(m, 2);
    require(m <= g.n / 2, "crop exceeds the field domain");
    BeltramiField out = field;
    out.grid = GridSpec{m * h, 2 * m};
    int off = g.n / 2 - m;
    out.samples.resize(out.grid.size());
    out.patch.resize(out.grid.size());
    out.region_of_node.resize(out.grid.size());
    for (int iy = 0; iy < 2 * m; ++iy) {
        for (int ix = 0; ix < 2 * m; ++ix) {
            std::size_t src = g.index(ix + off, iy + off);
            std::size_t dst = out.grid.index(ix, iy);
            out.samples[dst] = field.samples[src];
            out.patch[dst] = field.patch[src];
            out.region_of_node[dst] = field.region_of_node[src];
        }
    }
    return out;
}

DiscreteMap solve_truncated(const BeltramiField& field, const SolveOptions& options)
{
    field.grid.validate();
    field.validate();
    const auto& g = field.grid;
    double k = std::max(field.sup(), field.bound());
    require(k < 1.0, "Beltrami coefficient must satisfy sup |mu| < 1");
    require(options.tol > 0, "tolerance must be positive");
    double extent = support_extent(field);
    double R = field.truncation_radius.value_or(extent);
    require(extent <= R + g.spacing(), "field is nonzero outside its truncation radius");
    require(g.half_width >= 2.0 * std::max(R, extent) - 1e-12,
            "domain too small: need L >= 2R for the support radius R");
    require(g.upper() >= 1.0, "domain must contain the normalisation point 1");

    DiscreteMap map;
    map.grid = g;
    map.meta.field_hash = hash_samples(field.samples);
    map.meta.truncation_radius = field.truncation_radius;
    map.meta.contraction = k;

    const std::size_t n2 = g.size();
    std::vector<Complex> h(field.samples);
    std::vector<Complex> sh(n2);
    PlaneTransforms transforms(g);
    if (k > 0.0) {
        const double stop = options.tol * (1.0 - k);
        for (int it = 1; it <= options.max_iterations; ++it) {
            transforms.beurling(h, sh);
            double diff = 0.0, l2 = 0.0;
            for (std::size_t i = 0; i < n2; ++i) {
                Complex mu = field.samples[i];
                Complex next = mu == Complex(0.0) ? Complex(0.0) : mu * (1.0 + sh[i]);
                diff = std::max(diff, std::abs(next - h[i]));
                l2 += std::norm(next - h[i]);
                h[i] = next;
            }
            map.meta.history.push_back(diff);
            map.meta.history_l2.push_back(std::sqrt(l2) * g.spacing());
            map.meta.iterations = it;
            if (!std::isfinite(diff) || diff > 1e12) {
                throw NumericalError("Beltrami iteration diverged");
            }
            if (diff < stop) {
                map.meta.converged = true;
                break;
            }
        }
        if (!map.meta.converged) {
            throw NumericalError("Beltrami iteration did not converge within " +
                                 std::to_string(options.max_iterations) + " iterations");
        }
    } else {
        map.meta.converged = true;
    }

    std::vector<Complex> ch(n2, Complex(0.0));
    if (k > 0.0) transforms.cauchy(h, ch);
    map.w.resize(n2);
    for (std::size_t i = 0; i < n2; ++i) map.w[i] = g.node(i) + ch[i];

    Complex w0 = evaluate(map, 0.0);
    Complex w1 = evaluate(map, 1.0);
    if (!(std::abs(w1 - w0) > 0)) throw NumericalError("degenerate map: w(1) = w(0)");
    Complex scale = 1.0 / (w1 - w0);
    for (auto& v : map.w) v = (v - w0) * scale;
    map.normalized = true;

    if (options.diagnostics) {
        auto stats = beltrami_residual(map, field);
        map.meta.residual_sup = stats.sup;
        map.meta.residual_median = stats.median;
        map.meta.residual_nodes = stats.nodes;
        map.meta.orientation_fraction = stats.orientation_fraction;
    }
    return map;
}

LimitResult solve_limit(const BeltramiField& field, const std::vector<double>& ladder,
                        double k_radius, double tol, const SolveOptions& options)
{
    require(!ladder.empty(), "radius ladder is empty");
    require(std::is_sorted(ladder.begin(), ladder.end()) &&
                std::adjacent_find(ladder.begin(), ladder.end()) == ladder.end(),
            "radius ladder must be strictly increasing");
    require(ladder.front() > 0, "radii must be positive");
    require(field.grid.half_width >= 2.0 * ladder.back() - 1e-12,
            "field domain too small for the largest radius");
    require(k_radius > 0 && k_radius < ladder.front() * 2.0 - field.grid.spacing(),
            "compact set must lie in the smallest domain");

    LimitResult result;
    std::optional<DiscreteMap> previous;
    for (std::size_t r = 0; r < ladder.size(); ++r) {
        double R = ladder[r];
        auto sub = truncate(crop(field, 2.0 * R), R);
        auto map = solve_truncated(sub, options);
        result.radii.push_back(R);
        if (previous) {
            double diff = 0.0;
            const auto& pg = previous->grid;
            for (std::size_t i = 0; i < pg.size(); ++i) {
                Point z = pg.node(i);
                if (std::abs(z) >= k_radius) continue;
                diff = std::max(diff, std::abs(previous->w[i] - evaluate(map, z)));
            }
            result.differences.push_back(diff);
            if (diff < tol) {
                result.map = std::move(map);
                result.rung = r;
                result.converged = true;
                return result;
            }
        }
        previous = std::move(map);
    }
    result.map = std::move(*previous);
    result.rung = ladder.size() - 1;
    result.converged = false;
    return result;
}

Complex evaluate(const DiscreteMap& map, Point z)
{
    Complex w, wx, wy;
    bilinear(map, z, w, wx, wy);
    return w;
}

int boundary_winding(const DiscreteMap& map, Complex target)
{
    const auto& g = map.grid;
    const int n = g.n;
    std::vector<std::size_t> loop;
    for (int i = 0; i < n - 1; ++i) loop.push_back(g.index(i, 0));
    for (int j = 0; j < n - 1; ++j) loop.push_back(g.index(n - 1, j));
    for (int i = n - 1; i > 0; --i) loop.push_back(g.index(i, n - 1));
    for (int j = n - 1; j > 0; --j) loop.push_back(g.index(0, j));
    double total = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        Complex a = map.w[loop[k]] - target;
        Complex b = map.w[loop[(k + 1) % loop.size()]] - target;
        if (a == Complex(0.0) || b == Complex(0.0)) return 0;
        total += std::arg(b / a);
    }
    return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

Point invert_at(const DiscreteMap& map, Complex target, Point guess, double tol)
{
    require(boundary_winding(map, target) != 0, "target lies outside the image of the grid");
    const auto& g = map.grid;
    Point z = in_domain(g, guess) ? guess : clamp_to_domain(g, guess);
    if (newton(map, target, z, tol)) return z;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < map.w.size(); ++i) {
        double d = std::abs(map.w[i] - target);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    z = g.node(best);
    if (newton(map, target, z, tol)) return z;
    throw NumericalError("inversion failed to reach the target");
}

Complex finite_difference_mu(const DiscreteMap& map, int ix, int iy)
{
    auto d = central(map, ix, iy);
    return d.dzbar / d.dz;
}

ResidualStats beltrami_residual(const DiscreteMap& map, const BeltramiField& field, int collar)
{
    require(map.grid == field.grid, "map and field grids differ");
    const auto& g = map.grid;
    const int n = g.n;
    // Distance (in cells, Chebyshev) to the nearest patch change, capped at collar + 1.
    std::vector<char> near_jump(g.size(), 0);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            auto p = field.patch[g.index(ix, iy)];
            bool jump = false;
            if (ix + 1 < n && field.patch[g.index(ix + 1, iy)] != p) jump = true;
            if (iy + 1 < n && field.patch[g.index(ix, iy + 1)] != p) jump = true;
            if (ix + 1 < n && iy + 1 < n && field.patch[g.index(ix + 1, iy + 1)] != p) jump = true;
            if (ix > 0 && iy + 1 < n && field.patch[g.index(ix - 1, iy + 1)] != p) jump = true;
            if (!jump) continue;
            for (int dy = -collar; dy <= collar + 1; ++dy) {
                for (int dx = -collar; dx <= collar + 1; ++dx) {
                    int x = ix + dx, y = iy + dy;
                    if (x >= 0 && y >= 0 && x < n && y < n) near_jump[g.index(x, y)] = 1;
                }
            }
        }
    }
    ResidualStats s;
    std::vector<double> res, res_support;
    std::size_t interior = 0, positive = 0;
    for (int iy = 1; iy < n - 1; ++iy) {
        for (int ix = 1; ix < n - 1; ++ix) {
            auto d = central(map, ix, iy);
            ++interior;
            if (std::norm(d.dz) - std::norm(d.dzbar) > 0) ++positive;
            if (ix < collar || iy < collar || ix >= n - collar || iy >= n - collar) continue;
            std::size_t i = g.index(ix, iy);
            if (near_jump[i] || d.dz == Complex(0.0)) continue;
            Complex mu_fd = d.dzbar / d.dz;
            double r = std::abs(mu_fd - field.samples[i]);
            res.push_back(r);
            if (field.samples[i] == Complex(0.0)) {
                s.max_dbar_outside = std::max(s.max_dbar_outside, std::abs(mu_fd));
            } else {
                res_support.push_back(r);
            }
        }
    }
    s.nodes = res.size();
    s.orientation_fraction = interior ? static_cast<double>(positive) / interior : 1.0;
    if (!res.empty()) {
        s.sup = *std::max_element(res.begin(), res.end());
        double sum = 0;
        for (double r : res) sum += r;
        s.mean = sum / res.size();
        s.median = median_of(std::move(res));
    }
    s.support_nodes = res_support.size();
    if (!res_support.empty()) s.median_support = median_of(std::move(res_support));
    return s;
}

void write_map(const std::filesystem::path& stem, const DiscreteMap& map)
{
    nlohmann::json h;
    h["kind"] = "map";
    h["normalized"] = map.normalized;
    h["field_hash"] = map.meta.field_hash;
    if (map.meta.truncation_radius) h["truncation_radius"] = *map.meta.truncation_radius;
    h["iterations"] = map.meta.iterations;
    h["converged"] = map.meta.converged;
    h["contraction"] = map.meta.contraction;
    h["residual_sup"] = map.meta.residual_sup;
    h["residual_median"] = map.meta.residual_median;
    h["orientation_fraction"] = map.meta.orientation_fraction;
    write_grid_dump(stem, map.grid, map.w, h);
}

DiscreteMap read_map(const std::filesystem::path& stem)
{
    auto dump = read_grid_dump(stem);
    require(dump.header.value("kind", "") == "map", "grid dump is not a map");
    DiscreteMap m;
    m.grid = dump.grid;
    m.w = std::move(dump.values);
    const auto& h = dump.header;
    m.normalized = h.value("normalized", false);
    m.meta.field_hash = h.value("field_hash", std::uint64_t{0});
    if (h.contains("truncation_radius")) m.meta.truncation_radius = h["truncation_radius"].get<double>();
    m.meta.iterations = h.value("iterations", 0);
    m.meta.converged = h.value("converged", false);
    m.meta.contraction = h.value("contraction", 0.0);
    m.meta.residual_sup = h.value("residual_sup", 0.0);
    m.meta.residual_median = h.value("residual_median", 0.0);
    m.meta.orientation_fraction = h.value("orientation_fraction", 1.0);
    return m;
}

} // namespace rqc
