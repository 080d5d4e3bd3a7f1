#include "canopy/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "canopy/error.hpp"
#include "canopy/graphs.hpp"

namespace canopy {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ParameterError("expected a number, got nothing");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    throw ParameterError("expected a finite number, got '" + t + "'");
  return v;
}

long long to_integer(const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw ParameterError("expected an integer, got '" + t + "'");
  return v;
}

int to_int(const std::string& text) {
  const long long v = to_integer(text);
  if (v < -1'000'000'000LL || v > 1'000'000'000LL) throw ParameterError("integer out of range: " + trim(text));
  return static_cast<int>(v);
}

std::size_t to_count(const std::string& text) {
  const long long v = to_integer(text);
  if (v < 0) throw ParameterError("expected a non-negative integer, got '" + trim(text) + "'");
  return static_cast<std::size_t>(v);
}

std::vector<std::string> split_list(const std::string& text, char open, char close) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == open) {
    if (t.back() != close) throw ParameterError(std::string("unbalanced '") + open + "'");
    t = t.substr(1, t.size() - 2);
  }
  std::vector<std::string> out;
  if (trim(t).empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T, class F>
std::vector<T> list_of(const std::string& text, F conv) {
  std::vector<T> out;
  for (const auto& item : split_list(text, '[', ']')) out.push_back(conv(item));
  if (out.empty()) throw ParameterError("expected a non-empty list");
  return out;
}

std::pair<double, double> pair_of(const std::string& text) {
  const auto v = list_of<double>(text, to_double);
  if (v.size() != 2) throw ParameterError("expected two numbers 'a, b'");
  return {v[0], v[1]};
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"experiment", [](auto& c, const auto& v) { c.experiment = trim(v); }},
      {"K", [](auto& c, const auto& v) { c.K = to_int(v); }},
      {"L", [](auto& c, const auto& v) { c.L = to_int(v); }},
      {"L_list", [](auto& c, const auto& v) { c.L_list = list_of<int>(v, to_int); }},
      {"b", [](auto& c, const auto& v) { c.b = to_double(v); }},
      {"distribution",
       [](auto& c, const auto& v) {
         const std::string t = trim(v);
         if (t.empty() || t.front() != '{') throw ParameterError("distribution must be written {type, p1, p2}");
         const auto parts = split_list(t, '{', '}');
         if (parts.size() < 2 || parts.size() > 3) throw ParameterError("distribution must be written {type, p1, p2}");
         const double p1 = to_double(parts[1]);
         const double p2 = parts.size() == 3 ? to_double(parts[2]) : 0.0;
         if (parts.size() == 2 && parts[0] != "constant")
           throw ParameterError("distribution '" + parts[0] + "' needs two parameters");
         c.law = DisorderLaw::from_spec(parts[0], p1, p2);
       }},
      {"E", [](auto& c, const auto& v) { c.E = to_double(v); }},
      {"E_list", [](auto& c, const auto& v) { c.E_list = list_of<double>(v, to_double); }},
      {"eta", [](auto& c, const auto& v) { c.eta = to_double(v); }},
      {"eta_list", [](auto& c, const auto& v) { c.eta_list = list_of<double>(v, to_double); }},
      {"window", [](auto& c, const auto& v) { c.window = to_double(v); }},
      {"epsilon", [](auto& c, const auto& v) { c.epsilon = to_double(v); }},
      {"w", [](auto& c, const auto& v) { c.w = to_double(v); }},
      {"s", [](auto& c, const auto& v) { c.s = to_double(v); }},
      {"s_list", [](auto& c, const auto& v) { c.s_list = list_of<double>(v, to_double); }},
      {"tau_prime", [](auto& c, const auto& v) { c.tau_prime = to_double(v); }},
      {"realizations", [](auto& c, const auto& v) { c.realizations = to_count(v); }},
      {"seed", [](auto& c, const auto& v) { c.seed = static_cast<std::uint64_t>(to_count(v)); }},
      {"threads", [](auto& c, const auto& v) { c.threads = to_count(v); }},
      {"out_dir", [](auto& c, const auto& v) {
         c.out_dir = trim(v);
         if (c.out_dir.empty()) throw ParameterError("out_dir must not be empty");
       }},
      {"dense_cap", [](auto& c, const auto& v) { c.dense_cap = to_count(v); }},
      {"N", [](auto& c, const auto& v) { c.N = to_int(v); }},
      {"depth", [](auto& c, const auto& v) { c.depth = to_int(v); }},
      {"n_max", [](auto& c, const auto& v) { c.n_max = to_int(v); }},
      {"interval", [](auto& c, const auto& v) { std::tie(c.lo, c.hi) = pair_of(v); }},
      {"count_interval", [](auto& c, const auto& v) { std::tie(c.count_lo, c.count_hi) = pair_of(v); }},
      {"grid",
       [](auto& c, const auto& v) {
         const auto g = list_of<double>(v, to_double);
         if (g.size() != 3 || g[2] != std::floor(g[2])) throw ParameterError("grid must be written 'lo, hi, points'");
         c.grid_lo = g[0];
         c.grid_hi = g[1];
         c.grid_points = static_cast<int>(g[2]);
       }},
      {"test_point", [](auto& c, const auto& v) {
         const auto [re, im] = pair_of(v);
         c.test_point = {re, im};
       }},
      {"degree", [](auto& c, const auto& v) { c.degree = to_int(v); }},
      {"vertices", [](auto& c, const auto& v) { c.vertices = to_count(v); }},
      {"bulk_fraction", [](auto& c, const auto& v) { c.bulk_fraction = to_double(v); }},
      {"L_cap", [](auto& c, const auto& v) { c.L_cap = to_int(v); }},
      {"backbone_depths", [](auto& c, const auto& v) { c.backbone_depths = list_of<int>(v, to_int); }},
  };
  return table;
}

void assign(ExperimentConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
  try {
    it->second(cfg, value);
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + key + ": " + e.what());
  }
  cfg.origin[key] = where;
  cfg.raw[key] = trim(value);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void parse_config(ExperimentConfig& cfg, const std::string& text, const std::string& source) {
  std::stringstream in(text);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(n);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": missing key before '='");
    assign(cfg, key, line.substr(eq + 1), where);
  }
}

void parse_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  parse_config(cfg, ss.str(), path);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set " + assignment + ": expected key=value");
  assign(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1), "--set " + trim(assignment.substr(0, eq)));
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [&](const std::string& key, const std::string& msg) {
    const auto it = cfg.origin.find(key);
    const std::string where = it == cfg.origin.end() ? "default " + key : it->second;
    throw ConfigError(where + ": " + msg);
  };
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
    fail("experiment", "unknown experiment '" + cfg.experiment + "'");
  if (cfg.realizations < 1) fail("realizations", "realizations must be >= 1");
  if (cfg.K < 2) fail("K", "K must be >= 2");
  if (cfg.L < 0) fail("L", "L must be >= 0");
  for (int L : cfg.L_list)
    if (L < 0) fail("L_list", "depths must be >= 0");
  if (!(cfg.eta >= 0.0)) fail("eta", "eta must be >= 0");
  for (double e : cfg.eta_list)
    if (!(e > 0.0)) fail("eta_list", "every eta must be > 0");
  if (!(cfg.window > 0.0)) fail("window", "window must be > 0");
  if (!(cfg.hi > cfg.lo)) fail("interval", "interval must satisfy lo < hi");
  if (cfg.grid_points < 1 || !(cfg.grid_hi >= cfg.grid_lo)) fail("grid", "grid needs lo <= hi and >= 1 point");
  if (cfg.dense_cap < 1) fail("dense_cap", "dense_cap must be >= 1");

  const std::string& x = cfg.experiment;
  const bool random = cfg.law.family() != LawFamily::constant;
  auto tree_size = [&](int L) {
    try {
      return regular_tree_size(cfg.K, L);
    } catch (const std::exception& e) {
      fail("L", e.what());
    }
    return std::size_t{0};
  };
  if (x == "wegner_minami" && !random) fail("distribution", "wegner_minami needs a law with a density");
  if (x == "wegner_minami" && cfg.realizations < 100) fail("realizations", "wegner_minami needs >= 100 realizations");
  if (x == "spacing" && cfg.realizations < 200) fail("realizations", "spacing needs >= 200 realizations for count statistics");
  if (x == "canopy_chain" && tree_size(cfg.L) > cfg.dense_cap)
    fail("dense_cap", "canopy_chain diagonalizes T_L densely; |T_L| = " + std::to_string(tree_size(cfg.L)) +
                          " exceeds dense_cap");
  if (x == "rrg_contrast") {
    if (cfg.degree < 3) fail("degree", "degree must be >= 3");
    if (cfg.vertices > cfg.dense_cap) fail("dense_cap", "rrg_contrast: vertices exceed dense_cap");
    if (!(cfg.bulk_fraction > 0.0 && cfg.bulk_fraction <= 1.0)) fail("bulk_fraction", "bulk_fraction must lie in (0, 1]");
  }
  if (x == "fm_decay") {
    std::vector<double> ss = cfg.s_list.empty() ? std::vector<double>{cfg.s} : cfg.s_list;
    for (double s : ss) {
      if (!(s > 0.0 && s < 1.0)) fail(cfg.s_list.empty() ? "s" : "s_list", "s must lie in (0, 1)");
      if (random && !cfg.law.has_finite_moment(s))
        fail(cfg.s_list.empty() ? "s" : "s_list", "s exceeds the moment exponent of " + cfg.law.name());
    }
    if (cfg.L < 2) fail("L", "fm_decay needs L >= 2");
  }
  if (x == "sc_build" || x == "sw_diagnostic") {
    if (!random) fail("distribution", x + " needs a law with a density");
    const double cap = std::min(cfg.law.moment_exponent_limit(), 0.5) / 2;
    if (cfg.tau_prime < 0.0 || cfg.tau_prime > cap)
      fail("tau_prime", "tau_prime must lie in (0, min(tau, 1/2)/2] = (0, " + std::to_string(cap) + "]");
  }
  if (x == "lyapunov" && !random && cfg.L == 0 && cfg.eta == 0.0)
    fail("eta", "lyapunov at eta = 0 needs a continuous law");
  if ((x == "dos" || x == "sc_build") && cfg.n_max > cfg.depth) fail("n_max", "n_max must be <= depth");
  if (x == "dos" && !(cfg.eta > 0.0)) fail("eta", "dos needs eta > 0");
  if (x == "divisibility" && !(cfg.test_point.imag() > 0.0)) fail("test_point", "Im test_point must be > 0");
  if (x == "dos_convergence" && !(cfg.test_point.imag() > 0.0)) fail("test_point", "Im test_point must be > 0");
  if (x == "negligibility" && !(cfg.w >= 0.0)) fail("w", "w must be >= 0");
}

}  // namespace canopy
