#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "canopy/config.hpp"

namespace canopy {

struct RunResult {
  nlohmann::json summary;
  bool passed = true;
};

/// Runs one configured experiment, writing its CSVs and summary.json into
/// cfg.out_dir (created if needed). Bound/acceptance failures are reported in
/// the summary, not thrown.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& version);

/// Config echo with every key at its effective value.
nlohmann::json config_echo(const ExperimentConfig& cfg);

/// Writes gnuplot scripts next to the CSVs found in `dir`; returns the script names.
/// Throws ConfigError if `dir` is missing or holds no known CSV.
std::vector<std::string> emit_plots(const std::filesystem::path& dir);

}  // namespace canopy
