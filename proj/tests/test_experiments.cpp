#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rqc/beltrami.hpp"
#include "rqc/errors.hpp"
#include "rqc/experiments.hpp"
#include "rqc/solver.hpp"

using namespace rqc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("rqc_test_experiments_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::ifstream f(p);
    std::string line;
    while (std::getline(f, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

int run_cli(const std::string& args)
{
    std::string cmd = std::string(RQC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig small_percolation(const fs::path& out)
{
    ExperimentConfig c;
    c.subcommand = "percolation";
    c.seed = 11;
    c.output = out;
    c.params = {{"N", 32.0}, {"pairs", 30}, {"colorings", 3}, {"sources", 3}, {"r", {0.0, 0.05, 0.2}}};
    return c;
}

} // namespace

TEST_CASE("config round-trips through json")
{
    ExperimentConfig c;
    c.subcommand = "modulus";
    c.seed = 1234567890123ull;
    c.grid = GridSpec{24.5, 512};
    c.output = "somewhere/out";
    c.plot = true;
    c.params = {{"N", 48.0}, {"chain", {{"depth", 3}}}};
    auto back = ExperimentConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
    CHECK(back.to_json() == c.to_json());
    CHECK(back.grid->half_width == 24.5);

    auto r = c.resolved();
    CHECK(r.params["N"] == 48.0);
    CHECK(r.params["chain"]["depth"] == 3);
    CHECK(r.params["chain"]["N"] == 4.0);
    CHECK(r.params["rectangles"] == 20);
    CHECK(r.resolved().to_json() == r.to_json());
}

TEST_CASE("surface model from json")
{
    auto m = surface_model_from_json({{"law", "fixed"}, {"position", 0.5}});
    auto base = SurfaceModel::base();
    for (int i = 0; i < 4; ++i) CHECK(m.anchors[i] == doctest::Approx(base.anchors[i]));
    CHECK_THROWS_AS(surface_model_from_json({{"law", "nope"}}), PreconditionError);
    CHECK_THROWS_AS(surface_model_from_json({{"anchors", {0.0, 3.0, 2.0, 5.0}}}), PreconditionError);
}

TEST_CASE("identity solve writes the identity map")
{
    ExperimentConfig c;
    c.subcommand = "solve";
    c.grid = GridSpec{8, 128};
    c.output = scratch("identity");
    auto res = run_experiment(c);
    CHECK(res.summary["max_abs_error"].get<double>() <= 1e-12);
    auto map = read_map(c.output / "map");
    double err = 0;
    for (std::size_t i = 0; i < map.grid.size(); ++i) err = std::max(err, std::abs(map.w[i] - map.grid.node(i)));
    CHECK(err <= 1e-10);
    CHECK(fs::exists(c.output / "manifest.json"));
}

TEST_CASE("radial solve reports error against the closed form")
{
    ExperimentConfig c;
    c.subcommand = "solve";
    c.grid = GridSpec{8, 256};
    c.output = scratch("radial");
    c.params = {{"field", {{"kind", "radial"}, {"k", 1.0 / 3.0}, {"radius", 4.0}}}};
    auto res = run_experiment(c);
    CHECK(res.summary["relative_error"].get<double>() < 2e-2);
    auto rows = read_csv(c.output / "error_report.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][2] == "relative_error [1]");
}

TEST_CASE("percolation tables are deterministic and respect the contracts")
{
    auto a = small_percolation(scratch("perc_a"));
    auto b = small_percolation(scratch("perc_b"));
    run_experiment(a);
    run_experiment(b);
    for (const char* name : {"ratios.csv", "summary.csv"}) CHECK(slurp(a.output / name) == slurp(b.output / name));

    auto rows = read_csv(a.output / "ratios.csv");
    REQUIRE(rows.size() > 1);
    CHECK(rows[0][4] == "d [plane units]");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double d = std::stod(rows[i][4]);
        CHECK(d >= std::log(32.0));
        if (std::stod(rows[i][1]) == 0.0) CHECK(std::stod(rows[i][6]) == doctest::Approx(1.0).epsilon(1e-12));
    }
    auto summary = read_csv(a.output / "summary.csv");
    REQUIRE(summary.size() == 4);
    // min-ratio and median decrease along the r sweep
    for (std::size_t i = 2; i < summary.size(); ++i) {
        CHECK(std::stod(summary[i][4]) <= std::stod(summary[i - 1][4]));
        CHECK(std::stod(summary[i][7]) <= std::stod(summary[i - 1][7]));
    }
}

TEST_CASE("order run on the base surface")
{
    ExperimentConfig c;
    c.subcommand = "surface-order";
    c.seed = 5;
    c.output = scratch("order");
    c.params = {{"samples", 2}, {"n", 256}, {"r_min", 2.0}, {"r_max", 16.0}, {"t_count", 24}};
    auto res = run_experiment(c);
    auto fits = read_csv(c.output / "fits.csv");
    REQUIRE(fits.size() == 4);
    CHECK(fits[1][0] == "base");
    CHECK(std::stod(fits[1][2]) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(res.summary["A_monotone"].get<bool>());
    auto manifest = nlohmann::json::parse(slurp(c.output / "manifest.json"));
    CHECK(manifest["summary"]["runs"].size() == 3);
    CHECK(manifest["summary"]["runs"][1]["seed"].get<std::uint64_t>() != manifest["summary"]["runs"][2]["seed"].get<std::uint64_t>());
    CHECK(fs::exists(c.output / "slope_quantiles.csv"));
}

TEST_CASE("cli exit codes")
{
    auto out = scratch("cli");
    CHECK(run_cli("solve --half-width 4 -n 64 -o " + out.string()) == 0);
    CHECK(fs::exists(out / "map.bin"));
    CHECK(run_cli("solve -o " + out.string()) == 2);
    CHECK(run_cli("percolation -p r=1.5 -o " + out.string()) == 2);
    CHECK(run_cli("bogus") == 2);
    CHECK(run_cli("solve --half-width 4 -n 64 -c /nonexistent.json") == 2);
    // a solver that cannot converge in the iteration budget is a numerical failure
    CHECK(run_cli("solve --half-width 4 -n 64 -p field.kind=constant -p field.value=0.9 -p max_iterations=1 -o " +
                  out.string()) == 3);

    auto cfg = out / "cfg.json";
    std::ofstream(cfg) << R"({"subcommand": "solve", "seed": 3, "grid": {"half_width": 4, "n": 64}, "output": ")"
                       << (out / "from_cfg").string() << R"("})";
    CHECK(run_cli("solve -c " + cfg.string()) == 0);
    CHECK(fs::exists(out / "from_cfg" / "manifest.json"));
    CHECK(run_cli("percolation -c " + cfg.string()) == 2);
}
