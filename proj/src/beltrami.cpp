#include "rqc/beltrami.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <unordered_map>

#include "rqc/errors.hpp"

namespace rqc {

namespace {

constexpr double max_modulus = 1.0 - 1e-9;

void check_bound(double sup)
{
    if (!(sup >= 0.0) || sup > max_modulus) {
        throw NumericalError("region law reported sup |mu| >= 1");
    }
}

BeltramiField empty_like(const BeltramiField& f)
{
    BeltramiField out = f;
    std::fill(out.samples.begin(), out.samples.end(), Complex(0.0));
    return out;
}

} // namespace

RegionLaw point_mass_law(Complex value)
{
    require(std::abs(value) <= max_modulus, "point mass must satisfy |mu| < 1");
    return {"point_mass(" + std::to_string(value.real()) + "," + std::to_string(value.imag()) + ")",
            [value](const RegionId&, KeyedRng&) {
                return LawDraw{[value](Point) { return value; }, std::abs(value)};
            }};
}

RegionLaw discrete_law(std::vector<Complex> values)
{
    require(!values.empty(), "discrete law needs at least one value");
    for (Complex v : values) require(std::abs(v) <= max_modulus, "discrete law value has |mu| >= 1");
    return {"discrete(" + std::to_string(values.size()) + " values)",
            [values](const RegionId&, KeyedRng& rng) {
                Complex v = values[rng.below(values.size())];
                return LawDraw{[v](Point) { return v; }, std::abs(v)};
            }};
}

RegionLaw uniform_modulus_law(double kmin, double kmax)
{
    require(0.0 <= kmin && kmin <= kmax && kmax <= max_modulus, "need 0 <= kmin <= kmax < 1");
    return {"uniform_modulus(" + std::to_string(kmin) + "," + std::to_string(kmax) + ")",
            [kmin, kmax](const RegionId&, KeyedRng& rng) {
                double r = rng.uniform(kmin, kmax);
                double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
                Complex v = std::polar(r, t);
                return LawDraw{[v](Point) { return v; }, r};
            }};
}

RegionLaw truncated_normal_law(double mean, double sd, double kmax)
{
    require(sd > 0.0 && kmax > 0.0 && kmax <= max_modulus, "need sd > 0 and 0 < kmax < 1");
    require(std::abs(mean) < kmax + 6.0 * sd, "truncation window has negligible mass");
    return {"truncated_normal(" + std::to_string(mean) + "," + std::to_string(sd) + "," +
                std::to_string(kmax) + ")",
            [mean, sd, kmax](const RegionId&, KeyedRng& rng) {
                double x = 0.0;
                for (int attempt = 0;; ++attempt) {
                    x = mean + sd * rng.normal();
                    if (std::abs(x) <= kmax) break;
                    if (attempt > 100000) throw NumericalError("truncated normal rejection stalled");
                }
                return LawDraw{[x](Point) { return Complex(x); }, std::abs(x)};
            }};
}

double BeltramiField::sup() const
{
    double s = 0.0;
    for (Complex v : samples) s = std::max(s, std::abs(v));
    return s;
}

double BeltramiField::bound() const
{
    double s = 0.0;
    for (double v : region_sup) s = std::max(s, v);
    return s;
}

double BeltramiField::dilatation() const
{
    double k = std::max(bound(), sup());
    return (1.0 + k) / (1.0 - k);
}

void BeltramiField::validate() const
{
    require(samples.size() == grid.size(), "field sample count does not match its grid");
    for (Complex v : samples) {
        if (!(std::abs(v) <= max_modulus)) throw NumericalError("field sample with |mu| >= 1");
    }
}

BeltramiField constant_field(const GridSpec& grid, Complex value)
{
    grid.validate();
    require(std::abs(value) <= max_modulus, "constant coefficient must satisfy |mu| < 1");
    BeltramiField f;
    f.grid = grid;
    f.samples.assign(grid.size(), value);
    f.patch.assign(grid.size(), 0);
    f.regions = {RegionId{}};
    f.region_of_node.assign(grid.size(), 0);
    f.region_sup = {std::abs(value)};
    f.partition_ref = "constant";
    return f;
}

BeltramiField field_from_function(const GridSpec& grid, const std::function<Complex(Point)>& fn,
                                  double sup_bound)
{
    grid.validate();
    check_bound(sup_bound);
    BeltramiField f;
    f.grid = grid;
    f.samples.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f.samples[i] = fn(grid.node(i));
        if (!(std::abs(f.samples[i]) <= sup_bound + 1e-12)) {
            throw NumericalError("coefficient exceeds its declared bound");
        }
    }
    f.patch.assign(grid.size(), 0);
    f.regions = {RegionId{}};
    f.region_of_node.assign(grid.size(), 0);
    f.region_sup = {sup_bound};
    f.partition_ref = "function";
    return f;
}

BeltramiField sample_field(const Partition& partition, const std::vector<RegionLaw>& laws,
                           const GridSpec& grid, std::uint64_t seed, std::size_t max_nodes)
{
    grid.validate();
    require(grid.size() <= max_nodes, "grid exceeds the configured node budget");
    require(static_cast<int>(laws.size()) >= partition.local_count(),
            "a region law is required for every local index");
    const Rect& w = partition.window();
    require(w.contains(Point(-grid.half_width, -grid.half_width)) &&
                w.contains(Point(grid.upper(), grid.upper())),
            "grid domain must lie inside the partition window");

    BeltramiField f;
    f.grid = grid;
    f.seed = seed;
    f.partition_ref = partition.reference();
    f.samples.resize(grid.size());
    f.patch.resize(grid.size());
    f.region_of_node.resize(grid.size());

    std::unordered_map<RegionId, std::int32_t, RegionIdHash> index;
    std::vector<LawDraw> draws;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Point z = grid.node(i);
        RegionId id = partition.region_of(z);
        auto [it, inserted] = index.try_emplace(id, static_cast<std::int32_t>(f.regions.size()));
        if (inserted) {
            KeyedRng rng(seed, Stream::field, id.cx, id.cy, id.local);
            LawDraw d = laws[id.local].sample(id, rng);
            check_bound(d.sup);
            f.regions.push_back(id);
            f.region_sup.push_back(d.sup);
            draws.push_back(std::move(d));
        }
        std::int32_t r = it->second;
        Complex v = draws[r].coefficient(z);
        if (!(std::abs(v) <= draws[r].sup + 1e-12)) {
            throw NumericalError("region law produced a value above its reported sup");
        }
        f.samples[i] = v;
        f.patch[i] = r;
        f.region_of_node[i] = r;
    }
    return f;
}

BeltramiField truncate(const BeltramiField& field, double R)
{
    require(R > 0, "truncation radius must be positive");
    BeltramiField out = field;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        if (std::abs(out.grid.node(i)) >= R) {
            out.samples[i] = 0.0;
            out.patch[i] = -1;
        }
    }
    out.truncation_radius = field.truncation_radius ? std::min(*field.truncation_radius, R) : R;
    return out;
}

BeltramiField rescale(const BeltramiField& field, double delta)
{
    require(delta > 0 && std::isfinite(delta), "rescale factor must be positive");
    BeltramiField out = field;
    out.grid.half_width = field.grid.half_width * delta;
    if (field.truncation_radius) out.truncation_radius = *field.truncation_radius * delta;
    out.partition_ref = field.partition_ref + " scaled by " + std::to_string(delta);
    return out;
}

BeltramiField rescale_to(const BeltramiField& field, double delta, const GridSpec& target)
{
    require(delta > 0 && std::isfinite(delta), "rescale factor must be positive");
    target.validate();
    BeltramiField out = empty_like(field);
    out.grid = target;
    out.samples.assign(target.size(), 0.0);
    out.patch.assign(target.size(), -1);
    out.region_of_node.assign(target.size(), -1);
    const double tol = 1e-9 * field.grid.spacing();
    for (std::size_t i = 0; i < target.size(); ++i) {
        Point src = target.node(i) / delta;
        auto [fx, fy] = grid_coords(field.grid, src);
        require(fx >= -0.5 - tol && fy >= -0.5 - tol && fx <= field.grid.n - 0.5 + tol &&
                    fy <= field.grid.n - 0.5 + tol,
                "rescaled point falls outside the source domain");
        std::size_t j = field.grid.nearest(src);
        out.samples[i] = field.samples[j];
        out.patch[i] = field.patch[j];
        out.region_of_node[i] = field.region_of_node[j];
    }
    if (field.truncation_radius) out.truncation_radius = *field.truncation_radius * delta;
    out.partition_ref = field.partition_ref + " scaled by " + std::to_string(delta);
    return out;
}

BeltramiField pullback_conformal(const BeltramiField& field,
                                 const std::function<Complex(Point)>& g,
                                 const std::function<Complex(Point)>& dg)
{
    BeltramiField out = field;
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        Point z = field.grid.node(i);
        Complex d = dg(z);
        if (!(std::abs(d) > 0.0)) throw NumericalError("conformal map has vanishing derivative");
        Point gz = g(z);
        auto [fx, fy] = grid_coords(field.grid, gz);
        require(fx >= -0.5 && fy >= -0.5 && fx <= field.grid.n - 0.5 && fy <= field.grid.n - 0.5,
                "conformal image leaves the field domain");
        std::size_t j = field.grid.nearest(gz);
        out.samples[i] = field.samples[j] * std::conj(d) / d;
        out.patch[i] = field.patch[j];
        out.region_of_node[i] = field.region_of_node[j];
    }
    return out;
}

BoundEstimate probabilistic_bound_estimate(const std::vector<RegionLaw>& laws, double eps,
                                           int trials, std::uint64_t seed)
{
    require(eps > 0 && eps < 1, "epsilon must lie in (0, 1)");
    require(trials >= 100, "at least 100 trials are required");
    require(!laws.empty(), "no laws given");
    BoundEstimate est;
    for (std::size_t l = 0; l < laws.size(); ++l) {
        std::vector<double> sups(trials);
        for (int t = 0; t < trials; ++t) {
            RegionId id{t, 0, static_cast<int>(l)};
            KeyedRng rng(seed, Stream::trials, t, 0, static_cast<std::int64_t>(l));
            sups[t] = laws[l].sample(id, rng).sup;
            if (!(sups[t] < 1.0)) throw NumericalError("region law reported sup |mu| >= 1");
        }
        std::sort(sups.begin(), sups.end());
        auto need = static_cast<std::size_t>(std::ceil((1.0 - eps) * trials - 1e-9));
        need = std::clamp<std::size_t>(need, 1, sups.size());
        est.per_law.push_back(sups[need - 1]);
    }
    est.k = *std::max_element(est.per_law.begin(), est.per_law.end());
    est.K = (1.0 + est.k) / (1.0 - est.k);
    return est;
}

void write_field(const std::filesystem::path& stem, const BeltramiField& field)
{
    nlohmann::json h;
    h["kind"] = "beltrami";
    h["seed"] = field.seed;
    h["partition"] = field.partition_ref;
    if (field.truncation_radius) h["truncation_radius"] = *field.truncation_radius;
    auto regions = nlohmann::json::array();
    for (std::size_t r = 0; r < field.regions.size(); ++r) {
        const auto& id = field.regions[r];
        regions.push_back({id.cx, id.cy, id.local, field.region_sup[r]});
    }
    h["regions"] = regions;
    auto labels = stem;
    labels += ".labels.bin";
    h["labels_file"] = labels.filename().string();
    h["labels_layout"] = "int32 pairs (patch, region table index) per node, row-major";
    {
        std::ofstream out(labels, std::ios::binary);
        require(static_cast<bool>(out), "cannot open " + labels.string());
        for (std::size_t i = 0; i < field.grid.size(); ++i) {
            std::int32_t pair[2] = {field.patch[i], field.region_of_node[i]};
            out.write(reinterpret_cast<const char*>(pair), sizeof(pair));
        }
    }
    write_grid_dump(stem, field.grid, field.samples, h);
}

BeltramiField read_field(const std::filesystem::path& stem)
{
    auto dump = read_grid_dump(stem);
    require(dump.header.value("kind", "") == "beltrami", "grid dump is not a Beltrami field");
    BeltramiField f;
    f.grid = dump.grid;
    f.samples = std::move(dump.values);
    f.seed = dump.header.value("seed", std::uint64_t{0});
    f.partition_ref = dump.header.value("partition", "");
    if (dump.header.contains("truncation_radius")) {
        f.truncation_radius = dump.header["truncation_radius"].get<double>();
    }
    for (const auto& r : dump.header.at("regions")) {
        f.regions.push_back({r[0].get<std::int64_t>(), r[1].get<std::int64_t>(), r[2].get<int>()});
        f.region_sup.push_back(r[3].get<double>());
    }
    f.patch.assign(f.grid.size(), -1);
    f.region_of_node.assign(f.grid.size(), -1);
    auto labels = stem.parent_path() / dump.header.at("labels_file").get<std::string>();
    std::ifstream in(labels, std::ios::binary);
    require(static_cast<bool>(in), "cannot open " + labels.string());
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        std::int32_t pair[2];
        in.read(reinterpret_cast<char*>(pair), sizeof(pair));
        require(static_cast<bool>(in), "label file is truncated");
        f.patch[i] = pair[0];
        f.region_of_node[i] = pair[1];
    }
    f.validate();
    return f;
}

} // namespace rqc
