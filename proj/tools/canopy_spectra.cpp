// canopy-spectra: config-driven experiment runner.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "canopy/config.hpp"
#include "canopy/error.hpp"
#include "canopy/experiments.hpp"

#ifndef CANOPY_VERSION
#define CANOPY_VERSION "unknown"
#endif

namespace {

std::string known_experiments() {
  std::string s;
  for (const auto& n : canopy::experiment_names()) s += (s.empty() ? "" : ", ") + n;
  return s + ", plots";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random tree Hamiltonian spectra: run one experiment from a config file."};
  std::string experiment, config_path, plot_dir;
  std::vector<std::string> sets;
  bool check = false;
  app.add_option("experiment", experiment, "experiment name (" + known_experiments() + ")")->required();
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--set", sets, "override one key, key=value (repeatable)")->allow_extra_args(false);
  app.add_flag("--check", check, "exit 2 when any acceptance check fails");
  app.add_option("--dir", plot_dir, "output directory to scan (plots only; defaults to out_dir)");
  app.set_version_flag("--version", CANOPY_VERSION);
  CLI11_PARSE(app, argc, argv);

  try {
    canopy::ExperimentConfig cfg;
    if (!config_path.empty()) canopy::parse_config_file(cfg, config_path);
    for (const auto& s : sets) canopy::apply_override(cfg, s);

    if (experiment == "plots") {
      const auto written = canopy::emit_plots(plot_dir.empty() ? cfg.out_dir : plot_dir);
      for (const auto& w : written) std::cout << w << '\n';
      return 0;
    }
    if (config_path.empty()) throw canopy::ConfigError("--config is required");
    if (cfg.origin.count("experiment") && cfg.experiment != experiment)
      throw canopy::ConfigError(cfg.origin.at("experiment") + ": config names experiment '" + cfg.experiment +
                                "' but the command line asks for '" + experiment + "'");
    cfg.experiment = experiment;

    const auto result = canopy::run_experiment(cfg, CANOPY_VERSION);
    for (const auto& [name, ok] : result.summary["checks"].items())
      std::cout << (ok.get<bool>() ? "ok    " : "FAIL  ") << name << '\n';
    std::cout << "summary: " << (std::filesystem::path(cfg.out_dir) / "summary.json").string() << '\n';
    return check && !result.passed ? 2 : 0;
  } catch (const std::exception& e) {
    std::cerr << "canopy-spectra: " << e.what() << '\n';
    return 1;
  }
}
