#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rqc/errors.hpp"
#include "rqc/experiments.hpp"

namespace {

// "a.b=value" with value parsed as JSON, falling back to a plain string.
void apply_override(nlohmann::json& params, const std::string& item)
{
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw rqc::PreconditionError("--param expects key=value, got " + item);
    std::string key = item.substr(0, eq), text = item.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    nlohmann::json::json_pointer ptr("/" + [&] {
        std::string p = key;
        for (auto& ch : p)
            if (ch == '.') ch = '/';
        return p;
    }());
    params[ptr] = value;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Random quasiconformal surfaces: experiment runner"};
    app.set_version_flag("--version", rqc::software_version());
    app.require_subcommand(1);

    struct Options {
        std::string config, output;
        std::optional<std::uint64_t> seed;
        std::optional<double> half_width;
        std::optional<int> n;
        std::vector<std::string> params;
        bool plot = false, print_config = false;
    } o;

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"solve", "solve the Beltrami equation for a field and dump the map"},
        {"percolation", "chemical vs Euclidean distance ratios on colored partitions"},
        {"modulus", "rough quasiconformality and annulus chain diagnostics"},
        {"linearity", "deviation of surface maps from linear on growing disks"},
        {"surface-order", "Ahlfors-Shimizu characteristic and fitted order"}};
    for (const auto& [name, help] : subs) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", o.config, "JSON config file");
        sub->add_option("-s,--seed", o.seed, "master seed (overrides config)");
        sub->add_option("-o,--output", o.output, "output directory (overrides config)");
        sub->add_option("--half-width", o.half_width, "grid half-width L");
        sub->add_option("-n,--grid-n", o.n, "grid points per side");
        sub->add_option("-p,--param", o.params, "parameter override key=value (dots for nesting)");
        sub->add_flag("--plot", o.plot, "also write SVG plots");
        sub->add_flag("--print-config", o.print_config, "print the resolved config and exit");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        rqc::ExperimentConfig config;
        if (!o.config.empty()) config = rqc::ExperimentConfig::load(o.config);
        std::string name = app.get_subcommands().front()->get_name();
        if (!config.subcommand.empty() && config.subcommand != name)
            throw rqc::PreconditionError("config is for subcommand " + config.subcommand + ", not " + name);
        config.subcommand = name;
        if (o.seed) config.seed = *o.seed;
        if (!o.output.empty()) config.output = o.output;
        if (o.plot) config.plot = true;
        if (o.half_width || o.n) {
            if (!config.grid && !(o.half_width && o.n))
                throw rqc::PreconditionError("--half-width and --grid-n must be given together when the config has no grid");
            rqc::GridSpec g = config.grid.value_or(rqc::GridSpec{0, 0});
            if (o.half_width) g.half_width = *o.half_width;
            if (o.n) g.n = *o.n;
            config.grid = g;
        }
        for (const auto& item : o.params) apply_override(config.params, item);
        if (o.print_config) {
            std::cout << config.resolved().to_json().dump(2) << "\n";
            return 0;
        }
        auto res = rqc::run_experiment(config);
        std::cout << res.summary.dump(2) << "\n";
        for (const auto& f : res.files) std::cout << (config.output / f).string() << "\n";
        return 0;
    } catch (const rqc::PreconditionError& e) {
        std::cerr << "precondition failure: " << e.what() << "\n";
        return 2;
    } catch (const rqc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "precondition failure: bad config value: " << e.what() << "\n";
        return 2;
    }
}
