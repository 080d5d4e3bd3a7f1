#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "canopy/disorder.hpp"

namespace canopy {

/// Invalid configuration; the message starts with `source:line:` when the
/// offending entry came from a file or a --set override.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "spacing", "dos",         "dos_convergence", "wegner_minami", "negligibility", "divisibility", "lyapunov",
      "fm_decay", "canopy_chain", "sc_build",      "sw_diagnostic", "rrg_contrast",  "bethe"};
  return names;
}

struct ExperimentConfig {
  std::string experiment;
  int K = 2;
  int L = 8;
  std::vector<int> L_list;
  double b = 0.0;
  DisorderLaw law = DisorderLaw::cauchy(0, 1);
  double E = 0.0;
  std::vector<double> E_list;
  double eta = 1e-2;
  std::vector<double> eta_list;
  double window = 20.0;
  double epsilon = 0.1;
  double w = 1.0;
  double s = 0.2;
  std::vector<double> s_list;
  double tau_prime = 0.0;  // 0: min(tau, 1/2)/2 of the law
  std::size_t realizations = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::string out_dir = "out";
  std::size_t dense_cap = 8192;
  int N = 1;
  int depth = 12;
  int n_max = 12;
  double lo = -1.0, hi = 1.0;
  double count_lo = -1.5, count_hi = 1.5;
  double grid_lo = -4.0, grid_hi = 4.0;
  int grid_points = 41;
  std::complex<double> test_point{0.0, 1.0};
  int degree = 3;
  std::size_t vertices = 2000;
  double bulk_fraction = 0.5;
  int L_cap = 12;
  std::vector<int> backbone_depths;

  /// `source:line` of the last assignment of each key; absent keys are defaults.
  std::map<std::string, std::string> origin;
  /// Raw text of each assigned key, for the summary echo.
  std::map<std::string, std::string> raw;
};

/// All recognized keys.
const std::vector<std::string>& config_keys();

/// Parse flat `key = value` text (`#` comments, blank lines ignored). The
/// distribution is written `distribution = {type, p1, p2}`; lists are comma
/// separated, optionally in brackets.
void parse_config(ExperimentConfig& cfg, const std::string& text, const std::string& source);
void parse_config_file(ExperimentConfig& cfg, const std::string& path);
/// One `key=value` override.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
/// Experiment-specific checks; throws ConfigError naming the offending key's origin.
void validate(const ExperimentConfig& cfg);

}  // namespace canopy
