#include "rqc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rqc/elliptic.hpp"
#include "rqc/errors.hpp"

namespace rqc {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t mod2(std::int64_t a) { return a - 2 * floor_div(a, 2); }

Rect snap_window(const Rect& w, double a, double b)
{
    require(!w.empty(), "partition window must be nonempty");
    const double eps = 1e-9;
    return {std::floor(w.x0 / a + eps) * a, std::floor(w.y0 / b + eps) * b,
            std::ceil(w.x1 / a - eps) * a, std::ceil(w.y1 / b - eps) * b};
}

double wrap_from(double x, double lo)
{
    double r = std::fmod(x - lo, two_pi);
    if (r < 0) r += two_pi;
    return lo + r;
}

// Curvilinear triangles of one cell of the vertex-sector partition.
class CellCutter {
public:
    CellCutter(const EllipticBaseMap& map, std::int64_t cx, std::int64_t cy, int segments)
        : map_(map), cx_(cx), cy_(cy), segments_(segments)
    {
        a_ = map.cell_width();
        b_ = map.cell_height();
        upper_ = upper_cell(cx, cy);
        for (int dx = 0; dx < 2; ++dx) {
            for (int dy = 0; dy < 2; ++dy) {
                int label = vertex_label(cx + dx, cy + dy);
                corner_[label - 1] = Point((cx + dx) * a_, (cy + dy) * b_);
            }
        }
        center_ = solve(0.0, Point((cx + 0.5) * a_, (cy + 0.5) * b_));
        const auto& th = map.anchors();
        const auto& m = map.midpoints();
        for (int q = 0; q < 4; ++q) {
            theta_curve_[q] = trace(th[q]);
            theta_curve_[q].push_back(edge_point(q));
            mid_curve_[q] = trace(m[q]);
            mid_curve_[q].push_back(corner_[q]);
        }
    }

    // The two triangles touching the corner of label q + 1.
    std::array<Polygon, 2> triangles(int q) const
    {
        int next = (q + 1) % 4;
        std::vector<Point> t1{center_};
        t1.insert(t1.end(), theta_curve_[q].begin(), theta_curve_[q].end());
        t1.insert(t1.end(), mid_curve_[q].rbegin(), mid_curve_[q].rend());
        std::vector<Point> t2{center_};
        t2.insert(t2.end(), mid_curve_[q].begin(), mid_curve_[q].end());
        t2.insert(t2.end(), theta_curve_[next].rbegin(), theta_curve_[next].rend());
        return {Polygon(std::move(t1)), Polygon(std::move(t2))};
    }

private:
    Complex disk_target(double angle, double r) const
    {
        return std::polar(r, upper_ ? angle : -angle);
    }

    Point solve(Complex target, Point z) const
    {
        const double cap = 0.25 * std::min(a_, b_);
        for (int it = 0; it < 60; ++it) {
            auto d = map_.disk(z, cx_, cy_);
            Complex miss = target - d.u;
            if (std::abs(miss) < 1e-14) return z;
            Complex step = miss / d.du;
            if (std::abs(step) > cap) step *= cap / std::abs(step);
            z += step;
        }
        auto d = map_.disk(z, cx_, cy_);
        if (std::abs(target - d.u) > 1e-10) {
            throw NumericalError("ray preimage continuation failed to converge");
        }
        return z;
    }

    // Interior polyline points of the preimage of the ray at boundary angle phi.
    std::vector<Point> trace(double phi) const
    {
        std::vector<Point> pts;
        Point z = center_;
        const int sub = 8;
        for (int j = 1; j < segments_; ++j) {
            for (int s = 1; s <= sub; ++s) {
                double r = ((j - 1) + static_cast<double>(s) / sub) / segments_;
                z = solve(disk_target(phi, r), z);
            }
            pts.push_back(z);
        }
        return pts;
    }

    // Point on the edge from corner q-1 to corner q where the boundary angle is theta_q.
    Point edge_point(int q) const
    {
        const auto& th = map_.anchors();
        const auto& m = map_.midpoints();
        double lo = q == 0 ? m[3] - two_pi : m[q - 1];
        double target = wrap_from(th[q], lo);
        Point p0 = corner_[(q + 3) % 4];
        Point p1 = corner_[q];
        double s0 = 0.0, s1 = 1.0;
        for (int it = 0; it < 80; ++it) {
            double s = 0.5 * (s0 + s1);
            double ang = wrap_from(map_.disk(p0 + s * (p1 - p0), cx_, cy_).angle, lo);
            if (ang < target) s0 = s; else s1 = s;
        }
        Point e = p0 + 0.5 * (s0 + s1) * (p1 - p0);
        // exact edge coordinate
        if (p0.real() == p1.real()) e.real(p0.real());
        if (p0.imag() == p1.imag()) e.imag(p0.imag());
        return e;
    }

    const EllipticBaseMap& map_;
    std::int64_t cx_, cy_;
    int segments_;
    double a_ = 1, b_ = 1;
    bool upper_ = false;
    Point center_;
    std::array<Point, 4> corner_{};
    std::array<std::vector<Point>, 4> theta_curve_;
    std::array<std::vector<Point>, 4> mid_curve_;
};

nlohmann::json polygon_json(const Polygon& p)
{
    auto arr = nlohmann::json::array();
    for (Point v : p.vertices()) arr.push_back({v.real(), v.imag()});
    return arr;
}

} // namespace

std::size_t RegionIdHash::operator()(const RegionId& id) const noexcept
{
    std::uint64_t h = static_cast<std::uint64_t>(id.cx) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(id.cy) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(id.local) + 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

RegionId vertex_region(std::int64_t i, std::int64_t j)
{
    return {floor_div(i, 2), floor_div(j, 2), static_cast<int>(mod2(i) + 2 * mod2(j))};
}

std::pair<std::int64_t, std::int64_t> region_vertex(const RegionId& id)
{
    return {2 * id.cx + id.local % 2, 2 * id.cy + id.local / 2};
}

void Partition::finalize()
{
    centroids_.clear();
    mesh_size_ = 0.0;
    reach_ = Rect{};
    for (const auto& proto : prototypes_) {
        std::vector<Point> cs;
        std::vector<Point> all;
        for (const auto& piece : proto) {
            cs.push_back(piece.centroid());
            reach_ = reach_.united(piece.bounds());
            all.insert(all.end(), piece.vertices().begin(), piece.vertices().end());
        }
        centroids_.push_back(std::move(cs));
        for (std::size_t i = 0; i < all.size(); ++i) {
            for (std::size_t j = i + 1; j < all.size(); ++j) {
                mesh_size_ = std::max(mesh_size_, std::abs(all[i] - all[j]));
            }
        }
    }
}

Point Partition::offset(const RegionId& id) const
{
    return static_cast<double>(id.cx) * u_ + static_cast<double>(id.cy) * v_;
}

bool Partition::piece_present(int local, std::size_t piece, std::int64_t cx,
                              std::int64_t cy) const
{
    Point c = centroids_[local][piece] + static_cast<double>(cx) * u_ + static_cast<double>(cy) * v_;
    return window_.contains(c);
}

void Partition::visit(const Rect& q,
                      const std::function<void(const RegionId&, std::size_t)>& f) const
{
    const double ux = u_.real();
    const double vy = v_.imag();
    Rect area{std::max(q.x0, window_.x0), std::max(q.y0, window_.y0), std::min(q.x1, window_.x1),
              std::min(q.y1, window_.y1)};
    auto cx0 = static_cast<std::int64_t>(std::ceil((area.x0 - reach_.x1) / ux - 1e-9));
    auto cx1 = static_cast<std::int64_t>(std::floor((area.x1 - reach_.x0) / ux + 1e-9));
    auto cy0 = static_cast<std::int64_t>(std::ceil((area.y0 - reach_.y1) / vy - 1e-9));
    auto cy1 = static_cast<std::int64_t>(std::floor((area.y1 - reach_.y0) / vy + 1e-9));
    for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
        for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
            Point off = static_cast<double>(cx) * u_ + static_cast<double>(cy) * v_;
            for (int l = 0; l < local_count(); ++l) {
                const auto& proto = prototypes_[l];
                for (std::size_t k = 0; k < proto.size(); ++k) {
                    Rect b = proto[k].bounds().translated(off);
                    if (b.x0 > q.x1 || b.x1 < q.x0 || b.y0 > q.y1 || b.y1 < q.y0) continue;
                    if (!piece_present(l, k, cx, cy)) continue;
                    f(RegionId{cx, cy, l}, k);
                }
            }
        }
    }
}

std::vector<Polygon> Partition::pieces(const RegionId& id) const
{
    require(id.local >= 0 && id.local < local_count(), "region local index out of range");
    std::vector<Polygon> out;
    Point off = offset(id);
    const auto& proto = prototypes_[id.local];
    for (std::size_t k = 0; k < proto.size(); ++k) {
        if (piece_present(id.local, k, id.cx, id.cy)) out.push_back(proto[k].translated(off));
    }
    return out;
}

bool Partition::instantiated(const RegionId& id) const
{
    if (id.local < 0 || id.local >= local_count()) return false;
    for (std::size_t k = 0; k < prototypes_[id.local].size(); ++k) {
        if (piece_present(id.local, k, id.cx, id.cy)) return true;
    }
    return false;
}

std::vector<RegionId> Partition::regions() const
{
    std::vector<RegionId> ids;
    visit(window_, [&](const RegionId& id, std::size_t) { ids.push_back(id); });
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

Rect Partition::bounds(const RegionId& id) const
{
    Rect r{};
    Point off = offset(id);
    const auto& proto = prototypes_.at(id.local);
    for (std::size_t k = 0; k < proto.size(); ++k) {
        if (piece_present(id.local, k, id.cx, id.cy)) r = r.united(proto[k].bounds().translated(off));
    }
    return r;
}

std::vector<RegionId> Partition::regions_containing(Point p, double tol) const
{
    std::vector<RegionId> out;
    Rect q{p.real() - tol, p.imag() - tol, p.real() + tol, p.imag() + tol};
    visit(q, [&](const RegionId& id, std::size_t k) {
        if (prototypes_[id.local][k].contains(p - offset(id), tol)) out.push_back(id);
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RegionId Partition::region_of(Point p) const
{
    double scale = std::max({1.0, std::abs(window_.x0), std::abs(window_.x1), std::abs(window_.y0),
                             std::abs(window_.y1)});
    require(window_.contains(p, 1e-12 * scale), "point outside the partition window");
    auto hits = regions_containing(p, 1e-12 * scale);
    if (!hits.empty()) return hits.front();
    // Polyline round-off can leave slivers narrower than the tolerance; take the nearest.
    double reach = 1e-6 * mesh_size_;
    RegionId best{};
    double best_d = std::numeric_limits<double>::infinity();
    visit({p.real() - reach, p.imag() - reach, p.real() + reach, p.imag() + reach},
          [&](const RegionId& id, std::size_t k) {
              double d = prototypes_[id.local][k].distance_to(p - offset(id));
              if (d < best_d || (d == best_d && id < best)) {
                  best_d = d;
                  best = id;
              }
          });
    if (!std::isfinite(best_d)) throw NumericalError("no region covers the point");
    return best;
}

double Partition::distance(const RegionId& id, Point p) const
{
    double best = std::numeric_limits<double>::infinity();
    Point off = offset(id);
    const auto& proto = prototypes_.at(id.local);
    for (std::size_t k = 0; k < proto.size(); ++k) {
        if (!piece_present(id.local, k, id.cx, id.cy)) continue;
        best = std::min(best, proto[k].distance_to(p - off));
    }
    return best;
}

std::vector<RegionId> Partition::regions_near(Point p, double R) const
{
    std::vector<RegionId> out;
    visit({p.real() - R, p.imag() - R, p.real() + R, p.imag() + R},
          [&](const RegionId& id, std::size_t k) {
              const Polygon& poly = prototypes_[id.local][k];
              Point local = p - offset(id);
              if (poly.bounds().distance_to(local) >= R) return;
              if (std::abs(poly.vertices()[0] - local) < R || poly.distance_to(local) < R) {
                  out.push_back(id);
              }
          });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<RegionId> Partition::regions_near(const RegionId& id, double R) const
{
    auto mine = pieces(id);
    Rect box = bounds(id);
    std::vector<RegionId> out;
    visit({box.x0 - R, box.y0 - R, box.x1 + R, box.y1 + R}, [&](const RegionId& other, std::size_t k) {
        Polygon poly = prototypes_[other.local][k].translated(offset(other));
        for (const auto& m : mine) {
            if (m.bounds().distance_to(poly.bounds()) > R) continue;
            if (m.distance_to(poly) <= R) {
                out.push_back(other);
                return;
            }
        }
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t Partition::count_regions_in_disk(Point center, double R) const
{
    require(R > 0, "disk radius must be positive");
    double slack = 1e-12 * std::max(1.0, R);
    require(window_.contains_disk(center, R - slack), "disk exceeds the partition window");
    return regions_near(center, R).size();
}

std::vector<std::size_t> Partition::density_table(const std::vector<double>& radii,
                                                  const std::vector<Point>& centers) const
{
    require(!centers.empty(), "density table needs at least one center");
    std::vector<std::size_t> out;
    for (double R : radii) {
        std::size_t best = 0;
        for (Point c : centers) best = std::max(best, count_regions_in_disk(c, R));
        out.push_back(best);
    }
    return out;
}

std::string Partition::reference() const
{
    nlohmann::json j;
    j["kind"] = kind_ == Kind::square_grid ? "square_grid" : "vertex_sector";
    j["cell"] = {cell_width_, cell_height_};
    j["window"] = {window_.x0, window_.y0, window_.x1, window_.y1};
    if (anchors_) j["anchors"] = *anchors_;
    return j.dump();
}

nlohmann::json Partition::to_json() const
{
    nlohmann::json j;
    j["kind"] = kind_ == Kind::square_grid ? "square_grid" : "vertex_sector";
    j["cell_width"] = cell_width_;
    j["cell_height"] = cell_height_;
    j["period_u"] = {u_.real(), u_.imag()};
    j["period_v"] = {v_.real(), v_.imag()};
    j["window"] = {window_.x0, window_.y0, window_.x1, window_.y1};
    j["mesh_size"] = mesh_size_;
    if (anchors_) j["anchors"] = *anchors_;
    if (midpoints_) j["midpoints"] = *midpoints_;
    j["segments"] = segments_;
    auto protos = nlohmann::json::array();
    for (const auto& proto : prototypes_) {
        auto pieces = nlohmann::json::array();
        for (const auto& piece : proto) pieces.push_back(polygon_json(piece));
        protos.push_back(pieces);
    }
    j["prototypes"] = protos;
    return j;
}

Partition Partition::from_json(const nlohmann::json& j)
{
    Partition p;
    auto kind = j.at("kind").get<std::string>();
    require(kind == "square_grid" || kind == "vertex_sector", "unknown partition kind " + kind);
    p.kind_ = kind == "square_grid" ? Kind::square_grid : Kind::vertex_sector;
    p.cell_width_ = j.at("cell_width").get<double>();
    p.cell_height_ = j.at("cell_height").get<double>();
    auto u = j.at("period_u");
    auto v = j.at("period_v");
    p.u_ = {u[0].get<double>(), u[1].get<double>()};
    p.v_ = {v[0].get<double>(), v[1].get<double>()};
    require(p.u_.imag() == 0.0 && p.v_.real() == 0.0 && p.u_.real() > 0 && p.v_.imag() > 0,
            "only axis-aligned period lattices are supported");
    auto w = j.at("window");
    p.window_ = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>(), w[3].get<double>()};
    if (j.contains("anchors")) p.anchors_ = j["anchors"].get<std::array<double, 4>>();
    if (j.contains("midpoints")) p.midpoints_ = j["midpoints"].get<std::array<double, 4>>();
    p.segments_ = j.value("segments", 0);
    for (const auto& proto : j.at("prototypes")) {
        std::vector<Polygon> pieces;
        for (const auto& poly : proto) {
            std::vector<Point> pts;
            for (const auto& v2 : poly) pts.emplace_back(v2[0].get<double>(), v2[1].get<double>());
            pieces.emplace_back(std::move(pts));
        }
        p.prototypes_.push_back(std::move(pieces));
    }
    p.finalize();
    return p;
}

Partition build_square_grid(double cell_width, double cell_height, const Rect& window)
{
    require(cell_width > 0 && cell_height > 0, "cell dimensions must be positive");
    Partition p;
    p.kind_ = Partition::Kind::square_grid;
    p.cell_width_ = cell_width;
    p.cell_height_ = cell_height;
    p.u_ = {cell_width, 0};
    p.v_ = {0, cell_height};
    p.window_ = snap_window(window, cell_width, cell_height);
    p.prototypes_.push_back(
        {Polygon({{0, 0}, {cell_width, 0}, {cell_width, cell_height}, {0, cell_height}})});
    p.finalize();
    return p;
}

Partition build_vertex_sector_partition(double cell_width, double cell_height,
                                        std::array<double, 4> anchors, const Rect& window,
                                        int segments)
{
    return build_vertex_sector_partition(cell_width, cell_height, anchors,
                                         arc_midpoints(anchors), window, segments);
}

Partition build_vertex_sector_partition(double cell_width, double cell_height,
                                        std::array<double, 4> anchors,
                                        std::array<double, 4> midpoints, const Rect& window,
                                        int segments)
{
    require(segments >= 2, "need at least two segments per curved edge");
    EllipticBaseMap map(anchors, midpoints, cell_width);
    double b = map.cell_height();
    if (cell_height > 0) {
        require(std::abs(cell_height - b) <= 1e-9 * b,
                "cell height is fixed by the anchors and corner angles: expected " +
                    std::to_string(b));
    }
    Partition p;
    p.kind_ = Partition::Kind::vertex_sector;
    p.cell_width_ = cell_width;
    p.cell_height_ = b;
    p.u_ = {2 * cell_width, 0};
    p.v_ = {0, 2 * b};
    p.window_ = snap_window(window, cell_width, b);
    p.anchors_ = map.anchors();
    p.midpoints_ = map.midpoints();
    p.segments_ = segments;

    // triangles[tx][ty][q]: the pair touching the corner of label q + 1 in cell (tx, ty).
    std::array<std::array<std::array<std::array<Polygon, 2>, 4>, 2>, 2> triangles;
    for (int tx = 0; tx < 2; ++tx) {
        for (int ty = 0; ty < 2; ++ty) {
            CellCutter cut(map, tx, ty, segments);
            for (int q = 0; q < 4; ++q) triangles[tx][ty][q] = cut.triangles(q);
        }
    }
    for (int l = 0; l < 4; ++l) {
        int vi = l % 2;
        int vj = l / 2;
        int q = vertex_label(vi, vj) - 1;
        std::vector<Polygon> pieces;
        for (int cy = vj - 1; cy <= vj; ++cy) {
            for (int cx = vi - 1; cx <= vi; ++cx) {
                auto tx = mod2(cx);
                auto ty = mod2(cy);
                Point shift((cx - tx) * cell_width, (cy - ty) * b);
                for (const auto& tri : triangles[tx][ty][q]) pieces.push_back(tri.translated(shift));
            }
        }
        p.prototypes_.push_back(std::move(pieces));
    }
    p.finalize();
    return p;
}

} // namespace rqc
