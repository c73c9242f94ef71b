#include "rqc/experiments.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "rqc/asymptotics.hpp"
#include "rqc/errors.hpp"
#include "rqc/modulus.hpp"
#include "rqc/percolation.hpp"
#include "rqc/rng.hpp"
#include "rqc/solver.hpp"
#include "rqc/stats.hpp"
#include "rqc/tables.hpp"

namespace rqc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& defaults_for(const std::string& sub)
{
    static const json model = {{"anchors", {0.0, std::numbers::pi / 2, std::numbers::pi, 1.5 * std::numbers::pi}},
                               {"law", "uniform"},
                               {"fraction", 0.8},
                               {"position", 0.5},
                               {"cell_width", 1.0}};
    static const json solve = {{"field", {{"kind", "zero"}, {"radius", 0.0}}}, {"tol", 1e-10},
                               {"max_iterations", 500}, {"error_radius", 0.0}, {"write_field", false}};
    static const json percolation = {{"partition", "square"}, {"cell", 1.0},      {"N", 256.0},
                                     {"r", {0.02}},           {"pairs", 500},     {"colorings", 100},
                                     {"sources", 10},         {"resolution", 8.0}, {"lattice_checks", 1},
                                     {"rows", true}};
    static const json modulus = {{"field", {{"kind", "surface"}, {"radius", 0.0}, {"model", model}}},
                                 {"N", 64.0},
                                 {"rectangles", 20},
                                 {"side_floor", "log"},
                                 {"max_side", 24.0},
                                 {"resolution", 24},
                                 {"chain", {{"N", 4.0}, {"depth", 4}, {"resolution", 48}}}};
    static const json linearity = {{"ladder", {8.0, 16.0, 32.0, 64.0}},
                                   {"trials", 20},
                                   {"model", model},
                                   {"pixels_per_cell", 8.0},
                                   {"min_n", 256},
                                   {"max_n", 1024},
                                   {"tol", 1e-6},
                                   {"samples", 4096},
                                   {"controls", true}};
    static const json order = {{"samples", 10}, {"base", true}, {"model", model},   {"n", 1024},
                               {"r_min", 8.0},  {"r_max", 64.0}, {"t_min", 0.25},   {"t_count", 64},
                               {"tol", 1e-6},   {"truncation_factor", 1.1}};
    static const json empty = json::object();
    if (sub == "solve") return solve;
    if (sub == "percolation") return percolation;
    if (sub == "modulus") return modulus;
    if (sub == "linearity") return linearity;
    if (sub == "surface-order") return order;
    return empty;
}

Complex complex_from_json(const json& j)
{
    if (j.is_array()) {
        require(j.size() == 2, "complex values are [re, im]");
        return {j[0].get<double>(), j[1].get<double>()};
    }
    return {j.get<double>(), 0.0};
}

GridSpec require_grid(const ExperimentConfig& c)
{
    if (!c.grid) throw PreconditionError("this subcommand needs a grid {half_width, n}");
    c.grid->validate();
    return *c.grid;
}

// Field from {"kind": zero|constant|radial|surface|file, ...}, truncated at
// "radius" (0: half the grid half-width).
BeltramiField field_from_json(const json& spec, const GridSpec& grid, std::uint64_t seed)
{
    std::string kind = spec.value("kind", "zero");
    double R = spec.value("radius", 0.0);
    if (R <= 0) R = grid.half_width / 2;
    if (kind == "file") {
        auto f = read_field(spec.at("path").get<std::string>());
        return f.truncation_radius ? f : truncate(f, R);
    }
    if (kind == "zero") return truncate(constant_field(grid, 0.0), R);
    if (kind == "constant") return truncate(constant_field(grid, complex_from_json(spec.at("value"))), R);
    if (kind == "radial") {
        double k = spec.value("k", 1.0 / 3.0);
        require(std::abs(k) < 1, "radial coefficient must satisfy |k| < 1");
        auto f = field_from_function(
            grid, [k](Point z) { return std::abs(z) > 0 ? Complex(k) * z / std::conj(z) : Complex(0); }, std::abs(k));
        return truncate(f, R);
    }
    if (kind == "surface") {
        auto model = surface_model_from_json(spec.value("model", defaults_for("linearity")["model"]));
        double m = model.cell_width + model.base_map().cell_height();
        auto sample = sample_surface(model, {-R - m, -R - m, R + m, R + m}, seed);
        return surface_beltrami(model, sample, grid, R);
    }
    throw PreconditionError("unknown field kind " + kind);
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PreconditionError("cannot write " + path.string());
    f << text;
}

void emit(RunResult& res, const fs::path& dir, const std::string& name, const Table& t)
{
    t.write_csv(dir / name);
    res.files.emplace_back(name);
}

} // namespace

std::string software_version() { return "rqc 1.0.0"; }

json ExperimentConfig::to_json() const
{
    json j;
    j["subcommand"] = subcommand;
    j["seed"] = seed;
    if (grid) j["grid"] = {{"half_width", grid->half_width}, {"n", grid->n}};
    j["output"] = output.string();
    j["plot"] = plot;
    j["params"] = params;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    ExperimentConfig c;
    c.subcommand = j.at("subcommand").get<std::string>();
    c.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("grid")) c.grid = GridSpec{j["grid"].at("half_width").get<double>(), j["grid"].at("n").get<int>()};
    c.output = j.value("output", std::string("out"));
    c.plot = j.value("plot", false);
    c.params = j.value("params", json::object());
    return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path)
{
    std::ifstream f(path);
    if (!f) throw PreconditionError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("malformed config: ") + e.what());
    }
    return from_json(j);
}

ExperimentConfig ExperimentConfig::resolved() const
{
    ExperimentConfig c = *this;
    json merged = defaults_for(subcommand);
    merged.merge_patch(params);
    c.params = merged;
    return c;
}

SurfaceModel surface_model_from_json(const json& j)
{
    std::array<double, 4> anchors = j.value("anchors", std::array<double, 4>{0, std::numbers::pi / 2, std::numbers::pi,
                                                                           1.5 * std::numbers::pi});
    std::string law = j.value("law", "uniform");
    ArcLaw arc;
    if (law == "uniform") {
        arc = uniform_arc_law(j.value("fraction", 0.8));
    } else if (law == "corner") {
        arc = corner_arc_law();
    } else if (law == "fixed") {
        arc = fixed_arc_law(j.value("position", 0.5));
    } else {
        throw PreconditionError("unknown arc law " + law);
    }
    auto th = normalize_anchors(anchors);
    return SurfaceModel{th, arc_midpoints(th), {arc, arc, arc, arc}, j.value("cell_width", 1.0)};
}

RunResult run_solve(const ExperimentConfig& config)
{
    auto c = config.resolved();
    const auto& p = c.params;
    auto grid = require_grid(c);
    auto field = field_from_json(p["field"], grid, c.seed);
    auto map = solve_truncated(field, {p["tol"].get<double>(), p["max_iterations"].get<int>(), true});
    RunResult res;
    fs::create_directories(c.output);
    write_map(c.output / "map", map);
    res.files.emplace_back("map.json");
    res.files.emplace_back("map.bin");
    if (p["write_field"].get<bool>()) {
        write_field(c.output / "field", field);
        res.files.emplace_back("field.json");
        res.files.emplace_back("field.bin");
    }
    Table hist({{"iteration", "1"}, {"sup_difference", "plane units"}, {"l2_difference", "plane units"}});
    for (std::size_t i = 0; i < map.meta.history.size(); ++i) {
        double l2 = i < map.meta.history_l2.size() ? map.meta.history_l2[i] : std::nan("");
        hist.add({static_cast<std::int64_t>(i + 1), map.meta.history[i], l2});
    }
    emit(res, c.output, "residual_log.csv", hist);

    json s;
    s["iterations"] = map.meta.iterations;
    s["converged"] = map.meta.converged;
    s["contraction"] = map.meta.contraction;
    s["residual_median"] = map.meta.residual_median;
    s["residual_sup"] = map.meta.residual_sup;
    s["orientation_fraction"] = map.meta.orientation_fraction;
    s["field_hash"] = map.meta.field_hash;

    std::string kind = p["field"].value("kind", "zero");
    double er = p["error_radius"].get<double>();
    if (er <= 0) er = (field.truncation_radius ? *field.truncation_radius : grid.half_width / 2) / 2;
    std::function<Complex(Point)> exact;
    if (kind == "zero") exact = [](Point z) { return z; };
    if (kind == "constant") {
        Complex mu = complex_from_json(p["field"]["value"]);
        exact = [mu](Point z) { return (z + mu * std::conj(z)) / (1.0 + mu); };
    }
    if (kind == "radial") {
        double k = p["field"].value("k", 1.0 / 3.0);
        double alpha = 2 * k / (1 - k);
        exact = [alpha](Point z) { return std::abs(z) > 0 ? z * std::pow(std::abs(z), alpha) : Complex(0); };
    }
    if (exact) {
        Table err({{"x", "plane units"}, {"y", "plane units"}, {"abs_error", "plane units"}});
        double max_err = 0, max_w = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            Point z = grid.node(i);
            if (std::abs(z) > er) continue;
            Complex w = exact(z);
            max_err = std::max(max_err, std::abs(map.w[i] - w));
            max_w = std::max(max_w, std::abs(w));
        }
        Table summary({{"error_radius", "plane units"}, {"max_abs_error", "plane units"}, {"relative_error", "1"}});
        summary.add({er, max_err, max_w > 0 ? max_err / max_w : 0.0});
        emit(res, c.output, "error_report.csv", summary);
        s["error_radius"] = er;
        s["max_abs_error"] = max_err;
        s["relative_error"] = max_w > 0 ? max_err / max_w : 0.0;
    }
    if (c.plot) {
        PlotSeries sup{"sup difference", {}, {}}, l2{"L2 difference", {}, {}};
        for (std::size_t i = 0; i < hist.rows(); ++i) {
            sup.x.push_back(hist.number(i, 0));
            sup.y.push_back(hist.number(i, 1));
            l2.x.push_back(hist.number(i, 0));
            l2.y.push_back(hist.number(i, 2));
        }
        write_svg_plot(c.output / "residual_log.svg", {sup, l2},
                       {"successive iterate differences", "iteration", "difference", false, true});
        res.files.emplace_back("residual_log.svg");
    }
    res.summary = s;
    return res;
}

RunResult run_percolation(const ExperimentConfig& config)
{
    auto c = config.resolved();
    const auto& p = c.params;
    const double N = p["N"].get<double>(), cell = p["cell"].get<double>();
    std::string kind = p["partition"].get<std::string>();
    Rect window{-N - cell, -N - cell, N + cell, N + cell};
    auto part = kind == "square" ? build_square_grid(cell, cell, window)
                : kind == "vertex_sector"
                    ? build_vertex_sector_partition(cell, 0, {0, std::numbers::pi / 2, std::numbers::pi, 1.5 * std::numbers::pi}, window)
                    : throw PreconditionError("unknown partition " + kind);
    RatioOptions opts;
    opts.colorings = p["colorings"].get<int>();
    opts.sources = p["sources"].get<int>();
    opts.lattice_checks = p["lattice_checks"].get<int>();
    opts.keep_rows = p["rows"].get<bool>();
    std::vector<double> rs = p["r"].is_array() ? p["r"].get<std::vector<double>>() : std::vector<double>{p["r"].get<double>()};

    RunResult res;
    Table rows({{"N", "plane units"}, {"r", "1"}, {"coloring", "1"}, {"pair_id", "1"}, {"d", "plane units"},
                {"d_chem", "plane units"}, {"ratio", "1"}});
    Table summary({{"N", "plane units"}, {"r", "1"}, {"colorings", "1"}, {"pairs", "1"}, {"min_ratio", "1"},
                   {"q01", "1"}, {"q05", "1"}, {"median", "1"}, {"q95", "1"}, {"max_ratio", "1"},
                   {"fraction_min_ge_0.1", "1"}, {"yellow_fraction", "1"}, {"lattice_checked", "1"},
                   {"lattice_max_excess", "1"}, {"lattice_max_deficit", "1"}});
    json s = json::array();
    PlotSeries qmin{"min ratio", {}, {}}, qmed{"median ratio", {}, {}}, q05{"5% quantile", {}, {}};
    for (std::size_t k = 0; k < rs.size(); ++k) {
        auto st = ratio_experiment(part, rs[k], N, p["pairs"].get<int>(), p["resolution"].get<double>(),
                                   derive_seed(c.seed, k), opts);
        for (const auto& row : st.rows)
            rows.add({N, rs[k], static_cast<std::int64_t>(row.coloring), static_cast<std::int64_t>(row.pair), row.d,
                      row.d_chem, row.ratio});
        summary.add({N, rs[k], static_cast<std::int64_t>(st.colorings), static_cast<std::int64_t>(st.pairs), st.min_ratio,
                     st.q01, st.q05, st.median, st.q95, st.max_ratio, st.fraction_min_ok, st.mean_yellow_fraction,
                     static_cast<std::int64_t>(st.lattice_checked), st.lattice_max_excess, st.lattice_max_deficit});
        s.push_back({{"r", rs[k]}, {"min_ratio", st.min_ratio}, {"median", st.median},
                     {"fraction_min_ok", st.fraction_min_ok}, {"max_ratio", st.max_ratio}});
        qmin.x.push_back(rs[k]);
        qmin.y.push_back(st.min_ratio);
        qmed.x.push_back(rs[k]);
        qmed.y.push_back(st.median);
        q05.x.push_back(rs[k]);
        q05.y.push_back(st.q05);
    }
    if (opts.keep_rows) emit(res, c.output, "ratios.csv", rows);
    emit(res, c.output, "summary.csv", summary);
    if (c.plot) {
        write_svg_plot(c.output / "ratios.svg", {qmin, q05, qmed}, {"d_chem / d against r", "r", "ratio", false, false});
        res.files.emplace_back("ratios.svg");
    }
    res.summary = {{"per_r", s}};
    return res;
}

RunResult run_modulus(const ExperimentConfig& config)
{
    auto c = config.resolved();
    const auto& p = c.params;
    auto grid = require_grid(c);
    auto field = field_from_json(p["field"], grid, c.seed);
    const double N = p["N"].get<double>();
    double floor = p["side_floor"].is_string() ? std::log(N) : p["side_floor"].get<double>();
    auto rects = random_rectangles(N, p["rectangles"].get<int>(), floor, p["max_side"].get<double>(),
                                   derive_seed(c.seed, 1));
    auto rep = rough_qc_report(field, rects, floor, {.resolution = p["resolution"].get<int>(), .richardson = false});
    RunResult res;
    Table t({{"rectangle_id", "1"}, {"marking", "1"}, {"x0", "plane units"}, {"y0", "plane units"},
             {"x1", "plane units"}, {"y1", "plane units"}, {"euclidean", "1"}, {"intrinsic", "1"}, {"ratio", "1"}});
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        t.add({static_cast<std::int64_t>(i / 2), std::string(r.marking == Marking::vertical ? "vertical" : "horizontal"),
               r.rect.x0, r.rect.y0, r.rect.x1, r.rect.y1, r.euclidean, r.intrinsic, r.ratio});
    }
    emit(res, c.output, "rectangles.csv", t);
    json s;
    s["empirical_K"] = rep.empirical_K;
    s["side_floor"] = floor;
    const auto& ch = p["chain"];
    if (ch.value("depth", 0) > 0) {
        auto chain = annulus_chain_diagnostic(field, ch["N"].get<double>(), ch["depth"].get<int>(),
                                              {.resolution = ch["resolution"].get<int>(), .richardson = false});
        Table ct({{"ring", "1"}, {"inner_half_side", "plane units"}, {"euclidean", "1"}, {"image", "1"},
                  {"running_sum", "1"}, {"floor_1_over_64K", "1"}});
        double fl = 1.0 / (64.0 * rep.empirical_K);
        for (std::size_t k = 0; k < chain.image.size(); ++k)
            ct.add({static_cast<std::int64_t>(k), chain.inner[k], chain.euclidean[k], chain.image[k], chain.running_sum[k], fl});
        emit(res, c.output, "annulus_chain.csv", ct);
        s["chain_image"] = chain.image;
        s["chain_running_sum"] = chain.running_sum;
        if (c.plot) {
            PlotSeries img{"image ring moduli (running sum)", {}, chain.running_sum}, eu{"euclidean (running sum)", {}, {}};
            double acc = 0;
            for (std::size_t k = 0; k < chain.image.size(); ++k) {
                img.x.push_back(static_cast<double>(k + 1));
                eu.x.push_back(static_cast<double>(k + 1));
                acc += chain.euclidean[k];
                eu.y.push_back(acc);
            }
            write_svg_plot(c.output / "annulus_chain.svg", {img, eu}, {"annulus chain", "depth", "sum of extremal lengths", false, false});
            res.files.emplace_back("annulus_chain.svg");
        }
    }
    res.summary = s;
    return res;
}

RunResult run_linearity(const ExperimentConfig& config)
{
    auto c = config.resolved();
    const auto& p = c.params;
    auto model = surface_model_from_json(p["model"]);
    auto ladder = p["ladder"].get<std::vector<double>>();
    DeviationOptions opts{p["pixels_per_cell"].get<double>(), p["min_n"].get<int>(), p["max_n"].get<int>(),
                          p["tol"].get<double>(), p["samples"].get<int>()};
    auto rows = deviation_curve(model, ladder, p["trials"].get<int>(), c.seed, opts);
    RunResult res;
    Table d({{"R", "plane units"}, {"trial", "1"}, {"seed", "1"}, {"deviation", "1"}});
    Table s({{"R", "plane units"}, {"grid_n", "1"}, {"grid_half_width", "plane units"}, {"trials_ok", "1"},
             {"failures", "1"}, {"median", "1"}, {"q25", "1"}, {"q75", "1"}, {"min", "1"}, {"max", "1"},
             {"a11", "1"}, {"a12", "1"}, {"a21", "1"}, {"a22", "1"}, {"base_deviation", "1"}, {"radial_deviation", "1"}});
    json js = json::array();
    PlotSeries med{"median deviation", {}, {}}, radial{"radial control", {}, {}};
    for (const auto& row : rows) {
        for (std::size_t t = 0; t < row.deviations.size(); ++t)
            d.add({row.R, static_cast<std::int64_t>(t), std::to_string(row.seeds[t]), row.deviations[t]});
        double base_dev = std::nan(""), radial_dev = std::nan("");
        if (p["controls"].get<bool>()) {
            auto base = SurfaceModel::base(model.cell_width);
            base.anchors = model.anchors;
            base.midpoints = model.midpoints;
            double a = model.cell_width;
            auto sample = sample_surface(base, {-row.R - a, -row.R - a, row.R + a, row.R + a}, 0);
            auto map = solve_truncated(surface_beltrami(base, sample, row.grid, row.R), {opts.tol, 500, false});
            base_dev = estimate_linear_map(map, row.R, opts.samples).deviation;
            radial_dev = estimate_linear_map(map_from_function(row.grid, [](Point z) { return z * std::abs(z); }), row.R,
                                             opts.samples)
                             .deviation;
        }
        s.add({row.R, static_cast<std::int64_t>(row.grid.n), row.grid.half_width,
               static_cast<std::int64_t>(row.deviations.size()), static_cast<std::int64_t>(row.failures), row.median,
               row.q25, row.q75, row.min, row.max, row.mean_matrix[0], row.mean_matrix[1], row.mean_matrix[2],
               row.mean_matrix[3], base_dev, radial_dev});
        js.push_back({{"R", row.R}, {"median", row.median}, {"failures", row.failures}, {"base_deviation", base_dev},
                      {"radial_deviation", radial_dev}});
        med.x.push_back(row.R);
        med.y.push_back(row.median);
        radial.x.push_back(row.R);
        radial.y.push_back(radial_dev);
    }
    emit(res, c.output, "deviations.csv", d);
    emit(res, c.output, "summary.csv", s);
    if (c.plot) {
        write_svg_plot(c.output / "deviation.svg", {med}, {"deviation from the fitted linear map", "R", "sup |w - Az| / R", true, true});
        res.files.emplace_back("deviation.svg");
    }
    res.summary = {{"per_R", js}};
    return res;
}

RunResult run_order(const ExperimentConfig& config)
{
    auto c = config.resolved();
    const auto& p = c.params;
    auto model = surface_model_from_json(p["model"]);
    OrderOptions opts{p["n"].get<int>(),      p["r_min"].get<double>(),   p["r_max"].get<double>(),
                      p["t_min"].get<double>(), p["t_count"].get<int>(), p["truncation_factor"].get<double>(),
                      p["tol"].get<double>()};
    std::vector<std::uint64_t> seeds;
    if (p["samples"].is_array()) {
        seeds = p["samples"].get<std::vector<std::uint64_t>>();
    } else {
        for (int i = 0; i < p["samples"].get<int>(); ++i) seeds.push_back(derive_seed(c.seed, static_cast<std::uint64_t>(i)));
    }
    struct Item {
        std::string name;
        OrderRun run;
    };
    std::vector<Item> runs;
    if (p["base"].get<bool>()) {
        auto base = SurfaceModel::base(model.cell_width);
        base.anchors = model.anchors;
        base.midpoints = model.midpoints;
        runs.push_back({"base", order_run(base, 0, opts)});
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) runs.push_back({"random_" + std::to_string(i), order_run(model, seeds[i], opts)});

    RunResult res;
    Table area({{"sample", "1"}, {"seed", "1"}, {"t", "plane units"}, {"A", "sphere areas"}});
    Table ch({{"sample", "1"}, {"seed", "1"}, {"r", "plane units"}, {"T", "sphere areas"}, {"quadrature_error", "sphere areas"}});
    Table fits({{"sample", "1"}, {"seed", "1"}, {"slope", "1"}, {"lower_slope", "1"}, {"upper_slope", "1"},
                {"residual", "1"}, {"r0", "plane units"}, {"r1", "plane units"}, {"scale", "1"}, {"iterations", "1"},
                {"A_monotone", "1"}});
    std::vector<double> slopes;
    json js = json::array();
    std::vector<PlotSeries> curves;
    bool monotone_all = true;
    for (const auto& it : runs) {
        const auto& r = it.run;
        std::string seed = std::to_string(r.seed);
        bool mono = true;
        for (std::size_t k = 0; k < r.area.t.size(); ++k) {
            area.add({it.name, seed, r.area.t[k], r.area.A[k]});
            ch.add({it.name, seed, r.T.r[k], r.T.T[k], r.T.error[k]});
            if (k > 0 && r.area.A[k] < r.area.A[k - 1]) mono = false;
        }
        monotone_all = monotone_all && mono;
        fits.add({it.name, seed, r.fit.slope, r.fit.lower_slope, r.fit.upper_slope, r.fit.residual, r.fit.r0, r.fit.r1,
                  r.area.scale, static_cast<std::int64_t>(r.iterations), static_cast<std::int64_t>(mono ? 1 : 0)});
        if (it.name != "base") slopes.push_back(r.fit.slope);
        js.push_back({{"sample", it.name}, {"seed", r.seed}, {"slope", r.fit.slope}});
        if (curves.size() < 6) curves.push_back({it.name, r.T.r, r.T.T});
    }
    emit(res, c.output, "area.csv", area);
    emit(res, c.output, "characteristic.csv", ch);
    emit(res, c.output, "fits.csv", fits);
    json s;
    s["runs"] = js;
    s["A_monotone"] = monotone_all;
    if (!slopes.empty()) {
        Table q({{"statistic", "1"}, {"slope", "1"}});
        auto sorted = slopes;
        std::sort(sorted.begin(), sorted.end());
        q.add({std::string("min"), sorted.front()});
        q.add({std::string("q25"), quantile_sorted(sorted, 0.25)});
        q.add({std::string("median"), quantile_sorted(sorted, 0.5)});
        q.add({std::string("q75"), quantile_sorted(sorted, 0.75)});
        q.add({std::string("max"), sorted.back()});
        emit(res, c.output, "slope_quantiles.csv", q);
        s["median_slope"] = quantile_sorted(sorted, 0.5);
    }
    if (c.plot) {
        write_svg_plot(c.output / "characteristic.svg", curves, {"characteristic T(r)", "r", "T(r)", true, true});
        res.files.emplace_back("characteristic.svg");
    }
    res.summary = s;
    return res;
}

RunResult run_experiment(const ExperimentConfig& config)
{
    RunResult res;
    const auto& sub = config.subcommand;
    if (sub == "solve") {
        res = run_solve(config);
    } else if (sub == "percolation") {
        res = run_percolation(config);
    } else if (sub == "modulus") {
        res = run_modulus(config);
    } else if (sub == "linearity") {
        res = run_linearity(config);
    } else if (sub == "surface-order") {
        res = run_order(config);
    } else {
        throw PreconditionError("unknown subcommand " + sub);
    }
    json manifest;
    manifest["version"] = software_version();
    manifest["config"] = config.resolved().to_json();
    manifest["summary"] = res.summary;
    json files = json::array();
    for (const auto& f : res.files) files.push_back(f.string());
    manifest["files"] = files;
    write_text(config.output / "manifest.json", manifest.dump(2) + "\n");
    res.files.emplace_back("manifest.json");
    return res;
}

} // namespace rqc
