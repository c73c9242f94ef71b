#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rqc/grid.hpp"
#include "rqc/surface.hpp"

namespace rqc {

/// Everything a run depends on. `params` holds the subcommand-specific settings;
/// missing keys take the documented defaults (resolved() fills them in).
struct ExperimentConfig {
    std::string subcommand;
    std::uint64_t seed = 1;
    std::optional<GridSpec> grid;
    std::filesystem::path output = "out";
    bool plot = false;
    nlohmann::json params = nlohmann::json::object();

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::filesystem::path& path);
    /// Copy with every default made explicit.
    ExperimentConfig resolved() const;
};

struct RunResult {
    nlohmann::json summary;
    std::vector<std::filesystem::path> files;  ///< relative to the output directory
};

RunResult run_solve(const ExperimentConfig& config);
RunResult run_percolation(const ExperimentConfig& config);
RunResult run_modulus(const ExperimentConfig& config);
RunResult run_linearity(const ExperimentConfig& config);
RunResult run_order(const ExperimentConfig& config);
/// Dispatch on config.subcommand; writes manifest.json next to the tables.
RunResult run_experiment(const ExperimentConfig& config);

/// Surface model from {"anchors", "law", "fraction", "position", "cell_width"}.
SurfaceModel surface_model_from_json(const nlohmann::json& j);

std::string software_version();

} // namespace rqc
