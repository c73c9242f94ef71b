#include "rqc/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "rqc/errors.hpp"
#include "rqc/rng.hpp"
#include "rqc/stats.hpp"

namespace rqc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Point point_in_disk(KeyedRng& rng, double R)
{
    while (true) {
        Point p(rng.uniform(-R, R), rng.uniform(-R, R));
        if (std::norm(p) < R * R) return p;
    }
}

} // namespace

Coloring::Coloring(const Partition& partition, double r, std::uint64_t seed)
    : partition_(&partition), r_(r), seed_(seed), regions_(partition.regions())
{
    require(r >= 0 && r <= 1, "percolation parameter must lie in [0, 1]");
    yellow_.assign(regions_.size(), 0);
    index_.reserve(regions_.size());
    for (std::size_t i = 0; i < regions_.size(); ++i) index_.emplace(regions_[i], i);
}

std::size_t Coloring::index(const RegionId& id) const
{
    auto it = index_.find(id);
    if (it == index_.end()) throw PreconditionError("region is not instantiated in the coloring");
    return it->second;
}

bool Coloring::yellow(const RegionId& id) const { return yellow_[index(id)] != 0; }

void Coloring::set_yellow(const RegionId& id, bool yellow) { yellow_[index(id)] = yellow ? 1 : 0; }

bool Coloring::yellow_at(Point p) const { return yellow(partition_->region_of(p)); }

std::size_t Coloring::yellow_count() const
{
    return static_cast<std::size_t>(std::count(yellow_.begin(), yellow_.end(), 1));
}

double Coloring::yellow_fraction() const
{
    return regions_.empty() ? 0.0 : static_cast<double>(yellow_count()) / static_cast<double>(regions_.size());
}

std::vector<RegionId> Coloring::yellow_regions() const
{
    std::vector<RegionId> out;
    for (std::size_t i = 0; i < regions_.size(); ++i)
        if (yellow_[i]) out.push_back(regions_[i]);
    return out;
}

Coloring color(const Partition& partition, const std::vector<double>& yellow_prob, double r,
               std::uint64_t seed)
{
    require(!yellow_prob.empty(), "yellow probabilities are required");
    require(yellow_prob.size() == 1 || static_cast<int>(yellow_prob.size()) == partition.local_count(),
            "one yellow probability per local index");
    for (double p : yellow_prob) {
        if (!(p >= 0 && p <= r)) throw PreconditionError("yellow probability outside [0, r]");
    }
    Coloring c(partition, r, seed);
    for (const auto& id : c.regions()) {
        double p = yellow_prob.size() == 1 ? yellow_prob[0] : yellow_prob[static_cast<std::size_t>(id.local)];
        if (p <= 0) continue;
        KeyedRng rng(seed, Stream::coloring, id.cx, id.cy, id.local);
        if (rng.uniform() < p) c.set_yellow(id, true);
    }
    return c;
}

double lattice_anisotropy() { return 1.0 / std::cos(std::numbers::pi / 8) - 1.0; }

ChemicalDistance lattice_chemical_distance(const std::function<bool(Point)>& yellow_at,
                                           const Rect& box, Point x, Point y, double h)
{
    require(h > 0, "lattice spacing must be positive");
    require(box.contains(x) && box.contains(y), "endpoints must lie in the lattice box");
    const auto nx = static_cast<std::size_t>(std::floor(box.width() / h)) + 1;
    const auto ny = static_cast<std::size_t>(std::floor(box.height() / h)) + 1;
    require(nx >= 2 && ny >= 2, "lattice box too small");
    const std::size_t mx = 2 * nx - 1, my = 2 * ny - 1;
    // colors at half-spacing positions; edge (a, b) uses entry a + b
    std::vector<std::uint8_t> mid(mx * my, 0);
    for (std::size_t j = 0; j < my; ++j) {
        for (std::size_t i = 0; i < mx; ++i) {
            if (i % 2 == 0 && j % 2 == 0) continue;
            Point p(box.x0 + 0.5 * h * static_cast<double>(i), box.y0 + 0.5 * h * static_cast<double>(j));
            mid[j * mx + i] = yellow_at(p) ? 1 : 0;
        }
    }
    auto snap = [&](Point p) {
        auto i = static_cast<std::size_t>(std::clamp(std::lround((p.real() - box.x0) / h), 0L, static_cast<long>(nx - 1)));
        auto j = static_cast<std::size_t>(std::clamp(std::lround((p.imag() - box.y0) / h), 0L, static_cast<long>(ny - 1)));
        return j * nx + i;
    };
    const std::size_t src = snap(x), dst = snap(y);
    std::vector<double> dist(nx * ny, inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0;
    heap.emplace(0.0, src);
    const double diag = std::sqrt(2.0) * h;
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        if (u == dst) break;
        const long ui = static_cast<long>(u % nx), uj = static_cast<long>(u / nx);
        for (long dj = -1; dj <= 1; ++dj) {
            for (long di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                long vi = ui + di, vj = uj + dj;
                if (vi < 0 || vj < 0 || vi >= static_cast<long>(nx) || vj >= static_cast<long>(ny)) continue;
                auto v = static_cast<std::size_t>(vj) * nx + static_cast<std::size_t>(vi);
                std::size_t m = static_cast<std::size_t>(uj + vj) * mx + static_cast<std::size_t>(ui + vi);
                double w = mid[m] ? 0.0 : (di != 0 && dj != 0 ? diag : h);
                if (d + w < dist[v]) {
                    dist[v] = d + w;
                    heap.emplace(dist[v], v);
                }
            }
        }
    }
    ChemicalDistance out;
    out.value = dist[dst];
    out.spacing = h;
    out.slack = lattice_anisotropy() * std::abs(x - y) + 2 * h;
    return out;
}

ChemicalDistance chemical_distance(const Coloring& coloring, Point x, Point y, double resolution)
{
    return chemical_distance(coloring, x, y, resolution, coloring.partition().window());
}

ChemicalDistance chemical_distance(const Coloring& coloring, Point x, Point y, double resolution,
                                   const Rect& box)
{
    if (!(resolution >= 8)) throw PreconditionError("lattice resolution below 8 nodes per mesh size");
    const auto& part = coloring.partition();
    require(part.window().contains(x) && part.window().contains(y), "endpoints must lie in the window");
    double h = part.mesh_size() / resolution;
    return lattice_chemical_distance([&](Point p) { return coloring.yellow_at(p); }, box, x, y, h);
}

ChemicalMetric::ChemicalMetric(std::vector<Polygon> yellow) : polygons_(std::move(yellow))
{
    boxes_.reserve(polygons_.size());
    rect_.reserve(polygons_.size());
    for (const auto& p : polygons_) {
        boxes_.push_back(p.bounds());
        rect_.push_back(p.is_axis_rect() ? 1 : 0);
    }
}

ChemicalMetric::ChemicalMetric(const Coloring& coloring)
    : ChemicalMetric([&] {
          std::vector<Polygon> polys;
          for (const auto& id : coloring.yellow_regions()) {
              for (auto& p : coloring.partition().pieces(id)) polys.push_back(std::move(p));
          }
          return polys;
      }())
{
}

double ChemicalMetric::polygon_distance(std::size_t a, std::size_t b) const
{
    if (rect_[a] && rect_[b]) return boxes_[a].distance_to(boxes_[b]);
    return polygons_[a].distance_to(polygons_[b]);
}

std::vector<double> ChemicalMetric::from(Point x, std::span<const Point> targets) const
{
    const std::size_t P = polygons_.size(), T = targets.size();
    std::vector<double> dist(P + T, inf);
    for (std::size_t p = 0; p < P; ++p) {
        dist[p] = rect_[p] ? boxes_[p].distance_to(x) : polygons_[p].distance_to(x);
    }
    for (std::size_t t = 0; t < T; ++t) dist[P + t] = std::abs(targets[t] - x);

    // dense Dijkstra: the graph is complete
    std::vector<std::size_t> active(P + T);
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;
    std::vector<double> bx0(P), by0(P), bx1(P), by1(P);
    for (std::size_t p = 0; p < P; ++p) {
        bx0[p] = boxes_[p].x0;
        by0[p] = boxes_[p].y0;
        bx1[p] = boxes_[p].x1;
        by1[p] = boxes_[p].y1;
    }
    std::size_t remaining = T;
    while (remaining > 0 && !active.empty()) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < active.size(); ++k) {
            if (dist[active[k]] < dist[active[best]]) best = k;
        }
        const std::size_t u = active[best];
        active[best] = active.back();
        active.pop_back();
        if (u >= P) {
            --remaining;
            continue;
        }
        const double du = dist[u];
        for (std::size_t v : active) {
            if (v >= P) {
                double w = rect_[u] ? boxes_[u].distance_to(targets[v - P])
                                    : polygons_[u].distance_to(targets[v - P]);
                dist[v] = std::min(dist[v], du + w);
                continue;
            }
            double gx = std::max({0.0, bx0[v] - bx1[u], bx0[u] - bx1[v]});
            double gy = std::max({0.0, by0[v] - by1[u], by0[u] - by1[v]});
            double lb = std::sqrt(gx * gx + gy * gy);
            if (du + lb >= dist[v]) continue;
            double w = (rect_[u] && rect_[v]) ? lb : polygon_distance(u, v);
            dist[v] = std::min(dist[v], du + w);
        }
    }
    return {dist.begin() + static_cast<std::ptrdiff_t>(P), dist.end()};
}

double ChemicalMetric::operator()(Point x, Point y) const
{
    std::array<Point, 1> t{y};
    return from(x, t)[0];
}

RatioStats ratio_experiment(const Partition& partition, double r, double N, int pairs,
                            double resolution, std::uint64_t seed, const RatioOptions& options)
{
    require(pairs >= 1, "at least one pair is required");
    require(N >= 16, "N must be at least 16");
    require(options.colorings >= 1, "at least one coloring is required");
    require(partition.window().contains_disk(0.0, N), "partition window must contain B(0, N)");
    if (options.lattice_checks > 0 && !(resolution >= 8)) {
        throw PreconditionError("lattice resolution below 8 nodes per mesh size");
    }
    const double dmin = std::log(N);
    const int sources = options.sources > 0 ? std::min(options.sources, pairs) : pairs;

    RatioStats st;
    st.N = N;
    st.r = r;
    st.colorings = options.colorings;
    st.pairs = pairs;
    std::vector<double> all;
    double yellow_sum = 0;
    for (int c = 0; c < options.colorings; ++c) {
        Coloring col = color(partition, {r}, r, derive_seed(seed, static_cast<std::uint64_t>(c)));
        yellow_sum += col.yellow_fraction();
        ChemicalMetric metric(col);
        double cmin = inf;
        struct Pair {
            Point x, y;
            double d, dc;
        };
        std::vector<Pair> done;
        int pair_id = 0;
        for (int s = 0; s < sources; ++s) {
            int count = pairs / sources + (s < pairs % sources ? 1 : 0);
            KeyedRng rng(seed, Stream::pairs, c, s);
            Point x = point_in_disk(rng, N);
            std::vector<Point> ys;
            while (static_cast<int>(ys.size()) < count) {
                Point y = point_in_disk(rng, N);
                if (std::abs(y - x) >= dmin) ys.push_back(y);
            }
            auto dc = metric.from(x, ys);
            for (std::size_t t = 0; t < ys.size(); ++t) {
                double d = std::abs(ys[t] - x);
                double ratio = dc[t] / d;
                all.push_back(ratio);
                cmin = std::min(cmin, ratio);
                done.push_back({x, ys[t], d, dc[t]});
                if (options.keep_rows) st.rows.push_back({c, pair_id, d, dc[t], ratio});
                ++pair_id;
            }
        }
        st.coloring_min.push_back(cmin);
        if (options.lattice_checks > 0) {
            std::sort(done.begin(), done.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
            for (int k = 0; k < std::min<int>(options.lattice_checks, static_cast<int>(done.size())); ++k) {
                const auto& p = done[static_cast<std::size_t>(k)];
                double m = std::max(0.5 * p.d, 2 * partition.mesh_size());
                Rect box{std::min(p.x.real(), p.y.real()) - m, std::min(p.x.imag(), p.y.imag()) - m,
                         std::max(p.x.real(), p.y.real()) + m, std::max(p.x.imag(), p.y.imag()) + m};
                const Rect& w = partition.window();
                box = {std::max(box.x0, w.x0), std::max(box.y0, w.y0), std::min(box.x1, w.x1), std::min(box.y1, w.y1)};
                auto lat = chemical_distance(col, p.x, p.y, resolution, box);
                st.lattice_max_excess = std::max(st.lattice_max_excess, (lat.value - p.dc) / p.d);
                st.lattice_max_deficit = std::max(st.lattice_max_deficit, (p.dc - lat.value) / p.d);
                ++st.lattice_checked;
            }
        }
    }
    std::sort(all.begin(), all.end());
    st.min_ratio = all.front();
    st.max_ratio = all.back();
    st.median = quantile_sorted(all, 0.5);
    st.q01 = quantile_sorted(all, 0.01);
    st.q05 = quantile_sorted(all, 0.05);
    st.q25 = quantile_sorted(all, 0.25);
    st.q75 = quantile_sorted(all, 0.75);
    st.q95 = quantile_sorted(all, 0.95);
    auto ok = std::count_if(st.coloring_min.begin(), st.coloring_min.end(), [](double m) { return m >= 0.1; });
    st.fraction_min_ok = static_cast<double>(ok) / options.colorings;
    st.mean_yellow_fraction = yellow_sum / options.colorings;
    return st;
}

double insularity_fraction(const Coloring& coloring, double radius)
{
    require(radius > 0, "neighborhood radius must be positive");
    const auto& regions = coloring.regions();
    if (regions.empty()) return 0.0;
    const auto& part = coloring.partition();
    std::size_t insular = 0;
    for (const auto& id : regions) {
        if (coloring.yellow(id)) continue;
        bool ok = true;
        for (const auto& nb : part.regions_near(id, radius)) {
            if (part.instantiated(nb) && coloring.yellow(nb)) {
                ok = false;
                break;
            }
        }
        if (ok) ++insular;
    }
    return static_cast<double>(insular) / static_cast<double>(regions.size());
}

} // namespace rqc
