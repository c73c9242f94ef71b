#include "rqc/surface.hpp"

#include <cmath>
#include <unordered_map>
#include <numbers>

#include "rqc/errors.hpp"
#include "rqc/partition.hpp"

namespace rqc {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_from(double x, double lo)
{
    double r = std::fmod(x - lo, two_pi);
    if (r < 0) r += two_pi;
    return lo + r;
}

double arc_end(const std::array<double, 4>& th, int q) { return q < 3 ? th[q + 1] : th[0] + two_pi; }

} // namespace

ArcLaw uniform_arc_law(double fraction)
{
    require(fraction > 0 && fraction < 1, "arc fraction must lie in (0, 1)");
    return {"uniform_middle(" + std::to_string(fraction) + ")",
            [fraction](KeyedRng& rng, double lo, double hi, double) {
                double margin = 0.5 * (1.0 - fraction) * (hi - lo);
                return rng.uniform(lo + margin, hi - margin);
            }};
}

ArcLaw corner_arc_law()
{
    return {"corner", [](KeyedRng&, double, double, double m) { return m; }};
}

ArcLaw fixed_arc_law(double position)
{
    require(position > 0 && position < 1, "arc position must lie in (0, 1)");
    return {"fixed(" + std::to_string(position) + ")",
            [position](KeyedRng&, double lo, double hi, double) { return lo + position * (hi - lo); }};
}

SurfaceModel SurfaceModel::standard(double cell_width)
{
    const double pi = std::numbers::pi;
    std::array<double, 4> th{0, pi / 2, pi, 3 * pi / 2};
    auto law = uniform_arc_law(0.8);
    return {th, arc_midpoints(th), {law, law, law, law}, cell_width};
}

SurfaceModel SurfaceModel::base(double cell_width)
{
    auto m = standard(cell_width);
    auto law = corner_arc_law();
    m.laws = {law, law, law, law};
    return m;
}

nlohmann::json SurfaceModel::to_json() const
{
    auto map = base_map();
    nlohmann::json j;
    j["anchors"] = map.anchors();
    j["midpoints"] = map.midpoints();
    j["cell_width"] = cell_width;
    j["cell_height"] = map.cell_height();
    j["elliptic_modulus"] = map.modulus();
    auto laws_json = nlohmann::json::array();
    for (const auto& l : laws) laws_json.push_back(l.description);
    j["laws"] = laws_json;
    return j;
}

double SurfaceSample::at(std::int64_t i, std::int64_t j) const
{
    if (!covers(i, j)) throw PreconditionError("surface sample does not cover the vertex");
    return alpha[static_cast<std::size_t>((j - j0) * (i1 - i0 + 1) + (i - i0))];
}

double& SurfaceSample::at(std::int64_t i, std::int64_t j)
{
    if (!covers(i, j)) throw PreconditionError("surface sample does not cover the vertex");
    return alpha[static_cast<std::size_t>((j - j0) * (i1 - i0 + 1) + (i - i0))];
}

nlohmann::json SurfaceSample::to_json(const SurfaceModel&) const
{
    nlohmann::json j;
    j["seed"] = seed;
    auto verts = nlohmann::json::array();
    for (auto jj = j0; jj <= j1; ++jj) {
        for (auto ii = i0; ii <= i1; ++ii) {
            verts.push_back({{"i", ii}, {"j", jj}, {"label", vertex_label(ii, jj)}, {"alpha", at(ii, jj)}});
        }
    }
    j["vertices"] = verts;
    return j;
}

SurfaceSample sample_surface(const SurfaceModel& model, const Rect& window, std::uint64_t seed)
{
    require(!window.empty(), "surface window must be nonempty");
    auto map = model.base_map();
    const auto& th = map.anchors();
    const auto& m = map.midpoints();
    double a = map.cell_width(), b = map.cell_height();
    SurfaceSample s;
    s.seed = seed;
    s.i0 = static_cast<std::int64_t>(std::floor(window.x0 / a)) - 1;
    s.i1 = static_cast<std::int64_t>(std::ceil(window.x1 / a)) + 1;
    s.j0 = static_cast<std::int64_t>(std::floor(window.y0 / b)) - 1;
    s.j1 = static_cast<std::int64_t>(std::ceil(window.y1 / b)) + 1;
    s.alpha.resize(static_cast<std::size_t>((s.i1 - s.i0 + 1) * (s.j1 - s.j0 + 1)));
    for (auto j = s.j0; j <= s.j1; ++j) {
        for (auto i = s.i0; i <= s.i1; ++i) {
            int q = vertex_label(i, j) - 1;
            double lo = th[q], hi = arc_end(th, q);
            KeyedRng rng(seed, Stream::surface, i, j);
            double alpha = model.laws[q].sample(rng, lo, hi, m[q]);
            if (!(alpha > lo && alpha < hi)) {
                throw PreconditionError("arc law produced a point outside its arc");
            }
            s.at(i, j) = alpha;
        }
    }
    return s;
}

std::array<double, 8> sector_slopes(const SurfaceModel& model, const std::array<double, 4>& alpha)
{
    auto th = normalize_anchors(model.anchors);
    std::array<double, 4> m{};
    for (int q = 0; q < 4; ++q) m[q] = wrap_from(model.midpoints[q], th[q]);
    std::array<double, 8> s{};
    for (int q = 0; q < 4; ++q) {
        double lo = th[q], hi = arc_end(th, q);
        require(m[q] < hi, "corner angle outside its arc");
        double a = wrap_from(alpha[q], lo);
        require(a > lo && a < hi, "marked point outside its arc");
        s[2 * q] = (a - lo) / (m[q] - lo);
        s[2 * q + 1] = (hi - a) / (hi - m[q]);
    }
    return s;
}

Complex sector_beltrami(double slope, Complex u)
{
    require(slope > 0, "sector slope must be positive");
    double r = std::abs(u);
    require(r > 0, "sector coefficient is undefined at the centre");
    Complex dir = u / r;
    return dir * dir * ((1.0 - slope) / (1.0 + slope));
}

SectorInfo locate_sector(const EllipticBaseMap& map, Point z)
{
    SectorInfo info;
    auto [cx, cy] = map.cell_of(z);
    info.cx = cx;
    info.cy = cy;
    info.disk = map.disk(z, cx, cy);
    const auto& th = map.anchors();
    double t = wrap_from(info.disk.angle, th[0]);
    int q = 3;
    for (int k = 0; k < 3; ++k) {
        if (t < th[k + 1]) {
            q = k;
            break;
        }
    }
    info.label = q + 1;
    info.half = t < map.midpoints()[q] ? 0 : 1;
    for (int dx = 0; dx < 2; ++dx) {
        for (int dy = 0; dy < 2; ++dy) {
            if (vertex_label(cx + dx, cy + dy) == info.label) {
                info.vi = cx + dx;
                info.vj = cy + dy;
            }
        }
    }
    return info;
}

SurfaceEvaluator::SurfaceEvaluator(const SurfaceModel& model, const SurfaceSample& sample)
    : model_(model), sample_(sample), map_(model.base_map())
{
}

SectorInfo SurfaceEvaluator::locate(Point z) const { return locate_sector(map_, z); }

double SurfaceEvaluator::slope_for(const SectorInfo& info) const
{
    const auto& th = map_.anchors();
    const auto& m = map_.midpoints();
    int q = info.label - 1;
    double lo = th[q], hi = arc_end(th, q);
    double a = wrap_from(sample_.at(info.vi, info.vj), lo);
    return info.half == 0 ? (a - lo) / (m[q] - lo) : (hi - a) / (hi - m[q]);
}

double SurfaceEvaluator::deform_angle(const SectorInfo& info, double theta) const
{
    const auto& th = map_.anchors();
    const auto& m = map_.midpoints();
    int q = info.label - 1;
    double lo = th[q];
    double t = wrap_from(theta, lo);
    double a = wrap_from(sample_.at(info.vi, info.vj), lo);
    double s = slope_for(info);
    return info.half == 0 ? lo + s * (t - lo) : a + s * (t - m[q]);
}

double SurfaceEvaluator::slope(Point z) const { return slope_for(locate(z)); }

Complex SurfaceEvaluator::beltrami(Point z) const { return beltrami(locate(z), z); }

Complex SurfaceEvaluator::beltrami(const SectorInfo& info, Point z) const
{
    double scale = map_.cell_width();
    if (std::abs(info.disk.u) < 1e-12) {
        // centre of the hemisphere: the coefficient of the sector located there
        Complex dir = std::polar(1.0, info.disk.upper ? info.disk.angle : -info.disk.angle);
        Complex du = info.disk.du;
        return sector_beltrami(slope_for(info), dir) * std::conj(du) / du;
    }
    if (std::abs(info.disk.du) < 1e-9 / scale) {
        // corner: take the limit from the interior of the cell
        Point centre((info.cx + 0.5) * scale, (info.cy + 0.5) * map_.cell_height());
        return beltrami(z + 1e-6 * (centre - z));
    }
    double s = slope_for(info);
    Complex du = info.disk.du;
    return sector_beltrami(s, info.disk.u) * std::conj(du) / du;
}

Complex SurfaceEvaluator::deformed_disk(Point z) const
{
    SectorInfo info = locate(z);
    double r = std::abs(info.disk.u);
    double k = deform_angle(info, info.disk.angle);
    return std::polar(r, info.disk.upper ? k : -k);
}

Complex SurfaceEvaluator::sphere_value(Point z) const
{
    SectorInfo info = locate(z);
    double r = std::abs(info.disk.u);
    double k = deform_angle(info, info.disk.angle);
    Complex v = std::polar(r, info.disk.upper ? k : -k);
    return EllipticBaseMap::chart(info.disk.upper).inverse()(v);
}

double SurfaceEvaluator::spherical_density(Point z) const
{
    SectorInfo info = locate(z);
    double r = std::abs(info.disk.u);
    double k = deform_angle(info, info.disk.angle);
    Complex v = std::polar(r, info.disk.upper ? k : -k);
    Mobius inv = EllipticBaseMap::chart(info.disk.upper).inverse();
    double num = std::norm(inv.det());
    double den = std::norm(inv.a * v + inv.b) + std::norm(inv.c * v + inv.d);
    double sigma = num / (std::numbers::pi * den * den);
    return slope_for(info) * std::norm(info.disk.du) * sigma;
}

double SurfaceEvaluator::boundary_trace(Point z, std::int64_t cx, std::int64_t cy) const
{
    SectorInfo info;
    info.cx = cx;
    info.cy = cy;
    info.disk = map_.disk(z, cx, cy);
    const auto& th = map_.anchors();
    double t = wrap_from(info.disk.angle, th[0]);
    int q = 3;
    for (int k = 0; k < 3; ++k) {
        if (t < th[k + 1]) {
            q = k;
            break;
        }
    }
    info.label = q + 1;
    info.half = t < map_.midpoints()[q] ? 0 : 1;
    for (int dx = 0; dx < 2; ++dx) {
        for (int dy = 0; dy < 2; ++dy) {
            if (vertex_label(cx + dx, cy + dy) == info.label) {
                info.vi = cx + dx;
                info.vj = cy + dy;
            }
        }
    }
    return wrap_from(deform_angle(info, info.disk.angle), 0.0);
}

BeltramiField surface_beltrami(const SurfaceModel& model, const SurfaceSample& sample,
                               const GridSpec& grid, double truncation_radius)
{
    grid.validate();
    require(truncation_radius >= 0, "truncation radius must be nonnegative");
    SurfaceEvaluator eval(model, sample);
    const auto& map = eval.map();
    BeltramiField f;
    f.grid = grid;
    f.seed = sample.seed;
    {
        nlohmann::json ref;
        ref["kind"] = "vertex_sector";
        ref["cell"] = {map.cell_width(), map.cell_height()};
        ref["anchors"] = map.anchors();
        f.partition_ref = ref.dump();
    }
    f.samples.resize(grid.size());
    f.patch.resize(grid.size());
    f.region_of_node.resize(grid.size());
    std::unordered_map<std::uint64_t, std::int32_t> patches;
    std::unordered_map<RegionId, std::int32_t, RegionIdHash> regions;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Point z = grid.node(i);
        if (truncation_radius > 0 && std::abs(z) >= truncation_radius) {
            f.samples[i] = 0.0;
            f.patch[i] = -1;
            f.region_of_node[i] = -1;
            continue;
        }
        SectorInfo info = locate_sector(map, z);
        if (!sample.covers(info.vi, info.vj)) {
            throw PreconditionError("surface sample does not cover the grid window");
        }
        Complex mu = eval.beltrami(info, z);
        f.samples[i] = mu;
        auto key = (static_cast<std::uint64_t>(info.cx + (1 << 20)) << 24) |
                   (static_cast<std::uint64_t>(info.cy + (1 << 20)) << 3) |
                   static_cast<std::uint64_t>(2 * (info.label - 1) + info.half);
        auto [pit, pnew] = patches.try_emplace(key, static_cast<std::int32_t>(patches.size()));
        f.patch[i] = pit->second;
        RegionId id = vertex_region(info.vi, info.vj);
        auto [rit, rnew] = regions.try_emplace(id, static_cast<std::int32_t>(f.regions.size()));
        if (rnew) {
            f.regions.push_back(id);
            std::array<double, 4> alpha{};
            int q = info.label - 1;
            alpha = map.midpoints();
            alpha[q] = sample.at(info.vi, info.vj);
            auto s = sector_slopes(model, alpha);
            double k0 = std::abs(1 - s[2 * q]) / (1 + s[2 * q]);
            double k1 = std::abs(1 - s[2 * q + 1]) / (1 + s[2 * q + 1]);
            f.region_sup.push_back(std::max(k0, k1));
        }
        f.region_of_node[i] = rit->second;
        if (!(std::abs(mu) <= f.region_sup[rit->second] + 1e-9)) {
            throw NumericalError("surface coefficient exceeds its region bound");
        }
    }
    if (truncation_radius > 0) f.truncation_radius = truncation_radius;
    f.validate();
    return f;
}

} // namespace rqc
