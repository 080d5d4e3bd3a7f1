#include "canopy/experiments.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "canopy/decay.hpp"
#include "canopy/dos.hpp"
#include "canopy/ensemble.hpp"
#include "canopy/error.hpp"
#include "canopy/graphs.hpp"
#include "canopy/levelstats.hpp"
#include "canopy/resolvent.hpp"
#include "canopy/rng.hpp"
#include "canopy/spectral.hpp"

namespace canopy {

using nlohmann::json;
using cplx = std::complex<double>;

namespace {

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  json results = json::object();
  json checks = json::object();

  std::ofstream csv(const std::string& name) const {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    f.precision(17);
    return f;
  }
  void check(const std::string& name, bool ok) { checks[name] = ok; }
};

std::shared_ptr<const TreeGraph> regular(int K, int L) {
  return std::make_shared<const TreeGraph>(build_regular_tree(K, L));
}

double tau_prime_of(const ExperimentConfig& c) {
  return c.tau_prime > 0.0 ? c.tau_prime : std::min(c.law.moment_exponent_limit(), 0.5) / 2;
}

std::vector<double> energies(const ExperimentConfig& c) {
  return c.E_list.empty() ? std::vector<double>{c.E} : c.E_list;
}

std::vector<double> grid_of(const ExperimentConfig& c) {
  std::vector<double> g;
  for (int i = 0; i < c.grid_points; ++i)
    g.push_back(c.grid_points == 1 ? c.grid_lo : c.grid_lo + (c.grid_hi - c.grid_lo) * i / (c.grid_points - 1));
  return g;
}

// --- spacing ---------------------------------------------------------------

void run_spacing(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto g = regular(c.K, c.L);
  const std::size_t vol = g->vertex_count();
  const auto procs = map_realizations(c.realizations, [&](std::size_t r) {
    return tree_rescaled_process(sample_operator(g, c.law, c.b, c.seed, r), c.E, vol, c.window);
  });
  double points = 0;
  for (const auto& p : procs) points += static_cast<double>(p.points.size());
  const double intensity = points / (static_cast<double>(c.realizations) * 2 * c.window);
  const auto sp = spacing_statistics(procs);
  const double ks_exp = ks_distance(sp.spacings, SpacingReference::exponential_unit_mean);
  const double ks_goe = ks_distance(sp.spacings, SpacingReference::wigner_goe_surmise);
  const auto counts = count_distribution(procs, c.count_lo, c.count_hi, intensity);

  auto f = ctx.csv("spacings.csv");
  write_spacings_csv(f, sp);
  auto fc = ctx.csv("counts.csv");
  write_counts_csv(fc, counts);

  ctx.results["volume"] = vol;
  ctx.results["intensity"] = intensity;
  ctx.results["spacings"] = sp.spacings.size();
  ctx.results["ks_exponential"] = ks_exp;
  ctx.results["ks_wigner"] = ks_goe;
  ctx.results["count_tv_distance"] = counts.tv_distance;
  ctx.results["count_poisson_mean"] = counts.poisson_mean;
  ctx.check("ks_exponential_below_0.05", ks_exp < 0.05);
  ctx.check("exponential_closer_than_wigner", ks_exp < ks_goe);
  ctx.check("count_tv_below_0.05", counts.tv_distance < 0.05);
}

// --- dos -------------------------------------------------------------------

void run_dos(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto grid = grid_of(c);
  const CanopyDosParams p{c.K, c.b, c.eta, c.depth, c.n_max};
  const auto mc = canopy_dos_mc(c.law, p, grid, c.realizations, c.seed);
  auto f = ctx.csv("dos.csv");
  write_dos_csv(f, mc);
  ctx.results["tail_bound"] = mc.tail_bound;
  ctx.results["max_density"] = *std::max_element(mc.density.begin(), mc.density.end());

  if (c.law.family() != LawFamily::constant) {
    const double rho = c.law.density_sup();
    bool ok = true;
    for (std::size_t i = 0; i < grid.size(); ++i) ok = ok && mc.density[i] <= rho + 3 * mc.stderr_[i];
    ctx.results["density_sup"] = rho;
    ctx.check("density_below_rho_sup", ok);
  }
  if (c.law.family() == LawFamily::cauchy) {
    const auto ex = canopy_dos_exact_cauchy(c.K, c.law.p1(), c.law.p2(), c.b, grid, c.eta, c.depth, c.n_max);
    write_dos_csv(f, ex, false);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(mc.density[i] - ex.density[i]) / mc.stderr_[i]);
    ctx.results["max_deviation_in_stderr"] = worst;
    ctx.check("mc_matches_exact_cauchy_3sigma", worst <= 3.0);
  }
}

// --- dos_convergence -------------------------------------------------------

void run_dos_convergence(Context& ctx) {
  const auto& c = ctx.cfg;
  const cplx z = c.test_point;
  const std::vector<int> Ls = c.L_list.empty() ? std::vector<int>{6, 10} : c.L_list;
  // canopy_dos(F) for F = Im(. - z)^{-1} is pi times the canopy density at Re z, eta = Im z.
  double canopy = 0.0, canopy_err = 0.0;
  std::string method;
  if (c.law.family() == LawFamily::cauchy) {
    const std::vector<double> e{z.real()};
    const int n_max = 60;
    canopy = std::numbers::pi *
             canopy_dos_exact_cauchy(c.K, c.law.p1(), c.law.p2(), c.b, e, z.imag(), std::nullopt, n_max).density[0];
    method = "exact_cauchy";
  } else {
    const std::vector<double> e{z.real()};
    const auto d = canopy_dos_mc(c.law, {c.K, c.b, z.imag(), c.depth, c.n_max}, e, c.realizations, c.seed);
    canopy = std::numbers::pi * d.density[0];
    canopy_err = std::numbers::pi * d.stderr_[0];
    method = "mc_canopy";
  }
  auto f = ctx.csv("dos_convergence.csv");
  f << "L,finite_volume,stderr,canopy,abs_diff,rel_diff\n";
  std::vector<double> diffs;
  json rows = json::array();
  for (int L : Ls) {
    const auto fv = finite_volume_stieltjes(c.law, c.K, c.b, L, z, c.realizations, c.seed);
    const double d = std::abs(fv.mean - canopy);
    diffs.push_back(d);
    f << L << ',' << fv.mean << ',' << fv.stderr_ << ',' << canopy << ',' << d << ',' << d / canopy << '\n';
    rows.push_back({{"L", L}, {"finite_volume", fv.mean}, {"stderr", fv.stderr_}, {"abs_diff", d}});
  }
  ctx.results["canopy_value"] = canopy;
  ctx.results["canopy_stderr"] = canopy_err;
  ctx.results["canopy_method"] = method;
  ctx.results["by_L"] = rows;
  ctx.results["final_relative_diff"] = diffs.back() / canopy;
  bool decreasing = true;
  for (std::size_t i = 1; i < diffs.size(); ++i) decreasing = decreasing && diffs[i] < diffs[i - 1];
  ctx.check("difference_decreases_with_L", decreasing);
  ctx.check("relative_diff_below_5pct", diffs.back() / canopy < 0.05);
}

// --- wegner_minami ---------------------------------------------------------

void run_wegner_minami(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto g = regular(c.K, c.L);
  const auto counts = map_realizations(c.realizations, [&](std::size_t r) {
    const auto op = sample_operator(g, c.law, c.b, c.seed, r);
    return tree_count_below(op, std::nextafter(c.hi, INFINITY)) - tree_count_below(op, c.lo);
  });
  const auto rep = wegner_minami_check(counts, c.lo, c.hi, c.law, g->vertex_count());
  auto f = ctx.csv("counts.csv");
  f << "realization,count\n";
  for (std::size_t r = 0; r < counts.size(); ++r) f << r << ',' << counts[r] << '\n';
  ctx.results["mean_count"] = rep.count.mean;
  ctx.results["mean_count_stderr"] = rep.count.stderr_;
  ctx.results["factorial_moment"] = rep.factorial_moment.mean;
  ctx.results["factorial_moment_stderr"] = rep.factorial_moment.stderr_;
  ctx.results["wegner_bound"] = rep.wegner_bound;
  ctx.results["minami_bound"] = rep.minami_bound;
  ctx.check("wegner", rep.wegner_ok);
  ctx.check("minami", rep.minami_ok);
}

// --- negligibility ---------------------------------------------------------

void run_negligibility(Context& ctx) {
  const auto& c = ctx.cfg;
  const std::vector<int> Ls = c.L_list.empty() ? std::vector<int>{4, 6, 8, 10} : c.L_list;
  const auto curve = negligibility_curve(c.law, c.K, c.b, c.E, c.w, c.epsilon, Ls, c.realizations, c.seed);
  auto f = ctx.csv("negligibility.csv");
  write_negligibility_csv(f, curve);
  std::vector<double> x, y;
  json rows = json::array();
  bool strict = true;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    x.push_back(curve[i].L);
    y.push_back(curve[i].probability);
    rows.push_back({{"L", curve[i].L}, {"probability", curve[i].probability}, {"stderr", curve[i].stderr_}});
    if (i > 0) strict = strict && curve[i].probability < curve[i - 1].probability;
  }
  ctx.results["curve"] = rows;
  if (curve.size() >= 2) {
    const double rho = spearman(x, y);
    ctx.results["spearman"] = std::isfinite(rho) ? json(rho) : json(nullptr);
    ctx.check("negative_rank_correlation", rho < 0.0);
  }
  ctx.check("strictly_decreasing", strict);
}

// --- divisibility ----------------------------------------------------------

void run_divisibility(Context& ctx) {
  const auto& c = ctx.cfg;
  const std::vector<int> Ls = c.L_list.empty() ? std::vector<int>{8, 10} : c.L_list;
  auto f = ctx.csv("divisibility.csv");
  f << "L,N,gap,stderr\n";
  json rows = json::array();
  std::vector<double> gaps;
  bool zero_ok = true;
  for (int L : Ls) {
    if (c.N > L) throw ConfigError("divisibility: N exceeds an entry of L_list");
    const auto g = regular(c.K, L);
    for (int N : {0, c.N}) {
      const auto terms = map_realizations(c.realizations, [&](std::size_t r) {
        return divisibility_terms(sample_operator(g, c.law, c.b, c.seed, r), N, c.E, c.test_point);
      });
      const auto gap = divisibility_gap(terms);
      f << L << ',' << N << ',' << gap.gap << ',' << gap.stderr_ << '\n';
      rows.push_back({{"L", L}, {"N", N}, {"gap", gap.gap}, {"stderr", gap.stderr_}});
      if (N == 0) zero_ok = zero_ok && gap.gap == 0.0;
      else gaps.push_back(gap.gap);
      if (c.N == 0) break;
    }
  }
  ctx.results["gaps"] = rows;
  ctx.check("gap_zero_at_N0", zero_ok);
  if (c.N > 0) {
    bool decreasing = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) decreasing = decreasing && gaps[i] < gaps[i - 1];
    ctx.check("gap_decreases_with_L", decreasing);
  }
}

// --- lyapunov --------------------------------------------------------------

void run_lyapunov(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto Es = c.E_list.empty() ? std::vector<double>{0.0, 1.0, 2.0} : c.E_list;
  // The lower bound concerns the infinite tree; a single site (L = 0) is not compared.
  const bool random = c.law.family() != LawFamily::constant && c.L > 0;
  auto f = ctx.csv("lyapunov.csv");
  f << "E,gamma,stderr\n";
  json rows = json::array();
  bool bound_ok = true, closed_ok = true;
  const auto g = regular(c.K, c.L);
  const std::vector<double> alphas{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
  for (double E : Es) {
    const auto est = lyapunov_finite(c.law, c.K, c.b, c.L, E, c.eta, c.realizations, c.seed);
    f << E << ',' << est.mean << ',' << est.stderr_ << '\n';
    json row{{"E", E}, {"gamma", est.mean}, {"stderr", est.stderr_}};
    if (random) {
      const double eta = c.eta > 0.0 ? c.eta : 1e-12;
      const auto x = map_realizations(c.realizations, [&](std::size_t r) {
        return std::pow(std::abs(compute_gammas(sample_operator(g, c.law, c.b, c.seed, r), {E, eta}).gamma[0]), -2.0);
      });
      const auto lb = lyapunov_lower_bound(x, c.K, c.law.density_sup(), c.law.moment_exponent(), alphas);
      row["lower_bound_asw"] = lb.asw;
      row["lower_bound_closed_form"] = lb.closed_form;
      row["lower_bound"] = lb.value;
      bound_ok = bound_ok && lb.value <= est.mean + 3 * est.stderr_;
    }
    if (c.L == 0 && c.law.family() == LawFamily::cauchy && c.b == 0.0) {
      // E ln|omega - E| = ln|c - E - i gamma| for omega ~ cauchy(c, gamma).
      const double log_moment = -(est.mean + 0.5 * std::log(static_cast<double>(c.K)));
      const double exact = -0.5 * std::log(std::pow(E - c.law.p1(), 2) + std::pow(c.law.p2(), 2));
      row["log_moment"] = log_moment;
      row["log_moment_exact"] = exact;
      closed_ok = closed_ok && (c.eta > 0.0 || std::abs(log_moment - exact) <= 3 * est.stderr_);
    }
    rows.push_back(row);
  }
  ctx.results["by_energy"] = rows;
  if (random) ctx.check("lower_bound_below_estimate", bound_ok);
  if (c.L == 0 && c.law.family() == LawFamily::cauchy && c.b == 0.0 && c.eta == 0.0)
    ctx.check("single_site_closed_form", closed_ok);
}

// --- fm_decay --------------------------------------------------------------

void run_fm_decay(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto ss = c.s_list.empty() ? std::vector<double>{c.s} : c.s_list;
  json rows = json::array();
  bool any = false;
  double best_score = -INFINITY;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const auto fit = fractional_moment_decay(c.law, c.K, c.b, c.L, c.E, c.eta, ss[i], c.realizations, c.seed);
    const double score = fit.rate_stderr > 0 ? fit.excess / fit.rate_stderr : (fit.excess > 0 ? INFINITY : -INFINITY);
    const bool ok = fit.excess >= 3 * fit.rate_stderr && fit.excess > 0;
    any = any || ok;
    rows.push_back({{"s", ss[i]},
                    {"rate", fit.rate},
                    {"rate_stderr", fit.rate_stderr},
                    {"free_rate", ss[i] * 0.5 * std::log(static_cast<double>(c.K))},
                    {"excess", fit.excess},
                    {"significant", ok}});
    std::ostringstream name;
    name << "decay_s" << ss[i] << ".csv";
    auto f = ctx.csv(name.str());
    write_decay_csv(f, fit);
    if (score > best_score || i == 0) {
      best_score = score;
      auto d = ctx.csv("decay.csv");
      write_decay_csv(d, fit);
    }
  }
  ctx.results["fits"] = rows;
  ctx.check("excess_significant_for_some_s", any);
}

// --- canopy_chain ----------------------------------------------------------

void run_canopy_chain(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto pred = canopy_decomposition_spectrum(c.K, c.b, c.L);
  auto g = std::make_shared<const TreeGraph>(build_canopy_truncation(c.K, c.L, c.b));
  const auto dense = diagonalize(sample_operator(g, DisorderLaw::constant(0), c.b, c.seed, 0), false, c.dense_cap);
  double worst = pred.size() == dense.values.size() ? 0.0 : INFINITY;
  auto f = ctx.csv("chain_spectrum.csv");
  f << "n,decomposition,dense\n";
  for (std::size_t i = 0; i < std::min(pred.size(), dense.values.size()); ++i) {
    worst = std::max(worst, std::abs(pred[i] - dense.values[i]));
    f << i << ',' << pred[i] << ',' << dense.values[i] << '\n';
  }
  ctx.results["eigenvalues"] = pred.size();
  ctx.results["max_abs_diff"] = worst;
  ctx.check("decomposition_matches_dense", worst < 1e-9);
}

// --- sc_build --------------------------------------------------------------

struct ScDesign {
  double Cs = 0.0;
  double lambda = 0.0;
  DepthSchedule schedule;
};

ScDesign design_sc(const ExperimentConfig& c) {
  ScDesign d;
  const double tp = tau_prime_of(c);
  const double EI = std::max(std::abs(c.lo), std::abs(c.hi));
  std::vector<cplx> zs;
  for (int i = 0; i < 9; ++i) zs.emplace_back(c.lo + (c.hi - c.lo) * i / 8.0, kScheduleEta);
  std::vector<int> Ls;
  for (int L = 0; L <= std::min(c.L_cap, 8); L += 2) Ls.push_back(L);
  d.Cs = estimate_Cs(c.law, c.K, 0.0, 2 * tp, zs, Ls, c.realizations, c.seed);
  // One decorating tree root neighbours each backbone site.
  d.lambda = backbone_lambda_lower(2 * tp, EI, c.law, 1.0, d.Cs);
  d.schedule = sc_depth_schedule(c.law, c.K, c.lo, c.hi, tp, d.lambda, c.n_max, c.L_cap, c.realizations, c.seed);
  return d;
}

void run_sc_build(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto d = design_sc(c);
  auto f = ctx.csv("schedule.csv");
  f << "n,L_n,integral,threshold,capped\n";
  bool monotone = true;
  for (std::size_t n = 0; n < d.schedule.depths.size(); ++n) {
    f << n << ',' << d.schedule.depths[n] << ',' << d.schedule.integrals[n] << ',' << d.schedule.thresholds[n] << ','
      << (d.schedule.capped[n] ? 1 : 0) << '\n';
    if (n > 0) monotone = monotone && d.schedule.depths[n] >= d.schedule.depths[n - 1];
  }
  auto fi = ctx.csv("sc_integral.csv");
  fi << "L,integral\n";
  for (std::size_t L = 0; L < d.schedule.integral_by_L.size(); ++L)
    if (!std::isnan(d.schedule.integral_by_L[L])) fi << L << ',' << d.schedule.integral_by_L[L] << '\n';
  const auto bb = build_decorated_backbone(c.K, d.schedule.depths);
  ctx.results["tau_prime"] = tau_prime_of(c);
  ctx.results["C_s"] = d.Cs;
  ctx.results["lambda"] = d.lambda;
  ctx.results["depths"] = d.schedule.depths;
  ctx.results["capped"] = d.schedule.capped;
  ctx.results["backbone_vertices"] = bb.tree.vertex_count();
  std::size_t capped = 0;
  for (bool b : d.schedule.capped) capped += b;
  ctx.results["capped_count"] = capped;
  ctx.check("schedule_nondecreasing", monotone);
  ctx.check("n0_threshold_met", !d.schedule.capped.empty() && !d.schedule.capped[0]);
}

// --- sw_diagnostic ---------------------------------------------------------

std::vector<std::vector<double>> sw_samples(const std::shared_ptr<const TreeGraph>& g, Vertex x0,
                                            const ExperimentConfig& c, double b, std::uint64_t seed,
                                            const std::vector<double>& Es, const std::vector<double>& etas) {
  // Rows: (realization, energy) pairs in index order; columns: etas.
  return map_realizations(c.realizations * Es.size(), [&](std::size_t i) {
    const std::size_t r = i / Es.size();
    const double E = Es[i % Es.size()];
    return square_summability_diagnostic(sample_operator(g, c.law, b, seed, r), x0, E, etas);
  });
}

void write_sw(Context& ctx, const std::string& name, const std::vector<std::vector<double>>& rows,
              const std::vector<double>& etas, json& out) {
  auto f = ctx.csv(name);
  f << "eta,inverse_quantity,quantile\n";
  for (std::size_t j = 0; j < etas.size(); ++j) {
    std::vector<double> col;
    for (const auto& r : rows) col.push_back(r[j]);
    json q;
    for (double p : {0.25, 0.5, 0.75}) {
      const double v = quantile(col, p);
      f << etas[j] << ',' << v << ',' << p << '\n';
      q[p == 0.5 ? "median" : (p < 0.5 ? "q25" : "q75")] = v;
    }
    q["eta"] = etas[j];
    out.push_back(q);
  }
}

void run_sw_diagnostic(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto Es = energies(c);
  const auto etas = c.eta_list.empty() ? std::vector<double>{1e-2, 1e-3, 1e-4} : c.eta_list;
  std::size_t jcmp = etas.size() - 1;
  for (std::size_t j = 0; j < etas.size(); ++j)
    if (etas[j] == kScheduleEta) jcmp = j;

  std::vector<int> depths = c.backbone_depths;
  json bb_json = json::array();
  std::vector<std::vector<double>> bb_rows;
  if (depths.empty()) {
    depths = design_sc(c).schedule.depths;
    ctx.results["designed_depths"] = depths;
  }
  int D = c.depth;
  if (!depths.empty()) {
    const auto bb = build_decorated_backbone(c.K, depths);
    auto g = std::make_shared<const TreeGraph>(bb.tree);
    bb_rows = sw_samples(g, bb.backbone[0], c, 0.0, splitmix64(c.seed ^ 0xb0b), Es, etas);
    write_sw(ctx, "sw_diagnostic_backbone.csv", bb_rows, etas, bb_json);
    ctx.results["backbone"] = bb_json;
    ctx.results["backbone_vertices"] = bb.tree.vertex_count();
    // Matched size: the smallest canopy truncation at least as large as the backbone graph.
    D = 0;
    while (regular_tree_size(c.K, D) < bb.tree.vertex_count()) ++D;
  }
  auto g = std::make_shared<const TreeGraph>(build_canopy_truncation(c.K, D, c.b));
  const Vertex leaf = g->leftmost_ray().back();
  const auto can_rows = sw_samples(g, leaf, c, c.b, c.seed, Es, etas);
  json can_json = json::array();
  write_sw(ctx, "sw_diagnostic.csv", can_rows, etas, can_json);
  ctx.results["canopy"] = can_json;
  ctx.results["canopy_depth"] = D;
  ctx.results["canopy_vertices"] = g->vertex_count();
  ctx.results["compare_eta"] = etas[jcmp];
  if (!bb_rows.empty()) {
    std::vector<double> a, b;
    for (const auto& r : bb_rows) a.push_back(r[jcmp]);
    for (const auto& r : can_rows) b.push_back(r[jcmp]);
    const auto mw = mann_whitney_less(a, b);
    ctx.results["median_backbone"] = median(a);
    ctx.results["median_canopy"] = median(b);
    ctx.results["mann_whitney_u"] = mw.u;
    ctx.results["mann_whitney_p"] = mw.p_value;
    ctx.check("backbone_below_canopy", mw.p_value < 0.05);
  }
}

// --- rrg_contrast ----------------------------------------------------------

// Integrated Kesten-McKay density of the c-regular graph adjacency.
double kesten_mckay_cdf(int c, double x) {
  const double edge = 2 * std::sqrt(c - 1.0);
  if (x <= -edge) return 0.0;
  if (x >= edge) return 1.0;
  auto rho = [&](double t) {
    return c * std::sqrt(std::max(0.0, edge * edge - t * t)) / (2 * std::numbers::pi * (c * c - t * t));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(rho, -edge, x, 15, 1e-12);
}

void run_rrg_contrast(Context& ctx) {
  const auto& c = ctx.cfg;
  const double edge = 2 * std::sqrt(c.degree - 1.0);
  const double half = c.bulk_fraction * edge;
  const auto procs = map_realizations(c.realizations, [&](std::size_t r) {
    auto g = std::make_shared<const SimpleGraph>(build_random_regular(c.degree, c.vertices, realization_seed(c.seed, r)));
    const auto op = make_operator(g, std::vector<double>(c.vertices, 0.0));
    const auto eig = diagonalize(to_dense(op, c.dense_cap), false);
    RescaledPointProcess p{0.0, c.vertices, half, {}};
    for (double e : eig.values)
      if (std::abs(e) <= half) p.points.push_back(static_cast<double>(c.vertices) * kesten_mckay_cdf(c.degree, e));
    return p;
  });
  const auto sp = spacing_statistics(procs);
  auto f = ctx.csv("spacings.csv");
  write_spacings_csv(f, sp);
  const double ks_exp = ks_distance(sp.spacings, SpacingReference::exponential_unit_mean);
  const double ks_goe = ks_distance(sp.spacings, SpacingReference::wigner_goe_surmise);
  ctx.results["spacings"] = sp.spacings.size();
  ctx.results["ks_exponential"] = ks_exp;
  ctx.results["ks_wigner"] = ks_goe;
  ctx.check("wigner_closer_than_exponential", ks_goe < ks_exp);
}

// --- bethe -----------------------------------------------------------------

void run_bethe(Context& ctx) {
  const auto& c = ctx.cfg;
  const int Lmax = std::max(c.L, 1);
  std::vector<double> sizes, traces, stieltjes, errs;
  auto f = ctx.csv("bethe.csv");
  f << "L,vertices,trace_A2,stieltjes,stderr\n";
  for (int L = 0; L <= Lmax; ++L) {
    auto g = std::make_shared<const TreeGraph>(build_homogeneous_tree(c.K, L));
    const double n = static_cast<double>(g->vertex_count());
    sizes.push_back(n);
    traces.push_back(2 * (n - 1));
    const auto vals = map_realizations(c.realizations, [&](std::size_t r) {
      return resolvent_trace(sample_operator(g, c.law, c.b, c.seed, r), c.test_point).imag();
    });
    const auto est = mean_stderr(vals);
    stieltjes.push_back(est.mean);
    errs.push_back(est.stderr_);
    f << L << ',' << n << ',' << traces.back() << ',' << est.mean << ',' << est.stderr_ << '\n';
  }
  const auto one = bethe_average(sizes, c.K);
  const auto tr = bethe_average(traces, c.K);
  const auto st = bethe_average(stieltjes, c.K);
  ctx.results["bethe_average_of_one"] = one.value;
  ctx.results["bethe_average_of_trace_A2"] = tr.value;
  ctx.results["bethe_average_of_stieltjes"] = st.value;
  ctx.results["stieltjes_sequence"] = st.sequence;
  ctx.check("bethe_one_equals_1", one.value == 1.0);
  ctx.check("bethe_trace_A2_equals_K_plus_1", tr.value == c.K + 1.0);
}

}  // namespace

json config_echo(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["K"] = c.K;
  j["L"] = c.L;
  j["L_list"] = c.L_list;
  j["b"] = c.b;
  j["distribution"] = {{"type", c.law.name()}, {"p1", c.law.p1()}, {"p2", c.law.p2()}};
  j["E"] = c.E;
  j["E_list"] = c.E_list;
  j["eta"] = c.eta;
  j["eta_list"] = c.eta_list;
  j["window"] = c.window;
  j["epsilon"] = c.epsilon;
  j["w"] = c.w;
  j["s"] = c.s;
  j["s_list"] = c.s_list;
  j["tau_prime"] = c.tau_prime;
  j["realizations"] = c.realizations;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out_dir"] = c.out_dir;
  j["dense_cap"] = c.dense_cap;
  j["N"] = c.N;
  j["depth"] = c.depth;
  j["n_max"] = c.n_max;
  j["interval"] = {c.lo, c.hi};
  j["count_interval"] = {c.count_lo, c.count_hi};
  j["grid"] = {c.grid_lo, c.grid_hi, c.grid_points};
  j["test_point"] = {c.test_point.real(), c.test_point.imag()};
  j["degree"] = c.degree;
  j["vertices"] = c.vertices;
  j["bulk_fraction"] = c.bulk_fraction;
  j["L_cap"] = c.L_cap;
  j["backbone_depths"] = c.backbone_depths;
  j["assigned"] = c.raw;
  return j;
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& version) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  Context ctx{cfg, cfg.out_dir};
  std::filesystem::create_directories(ctx.dir);
  if (cfg.threads > 0) set_thread_override(cfg.threads);

  const std::string& x = cfg.experiment;
  if (x == "spacing") run_spacing(ctx);
  else if (x == "dos") run_dos(ctx);
  else if (x == "dos_convergence") run_dos_convergence(ctx);
  else if (x == "wegner_minami") run_wegner_minami(ctx);
  else if (x == "negligibility") run_negligibility(ctx);
  else if (x == "divisibility") run_divisibility(ctx);
  else if (x == "lyapunov") run_lyapunov(ctx);
  else if (x == "fm_decay") run_fm_decay(ctx);
  else if (x == "canopy_chain") run_canopy_chain(ctx);
  else if (x == "sc_build") run_sc_build(ctx);
  else if (x == "sw_diagnostic") run_sw_diagnostic(ctx);
  else if (x == "rrg_contrast") run_rrg_contrast(ctx);
  else if (x == "bethe") run_bethe(ctx);

  RunResult out;
  for (const auto& [k, v] : ctx.checks.items()) out.passed = out.passed && v.get<bool>();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.summary = {{"experiment", x},      {"version", version},   {"seed", cfg.seed},
                 {"config", config_echo(cfg)}, {"results", ctx.results}, {"checks", ctx.checks},
                 {"passed", out.passed}, {"runtime_seconds", secs}};
  std::ofstream f(ctx.dir / "summary.json", std::ios::binary);
  f << out.summary.dump(2) << '\n';
  return out;
}

std::vector<std::string> emit_plots(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError(dir.string() + ": output directory does not exist");
  struct Script {
    const char* csv;
    const char* name;
    const char* body;
  };
  static const Script scripts[] = {
      {"spacings.csv", "spacing.plot",
       "set datafile separator ','\nset xlabel 'normalized spacing s'\nset ylabel 'density'\n"
       "binwidth = 0.1\nbin(x) = binwidth * floor(x / binwidth) + binwidth / 2\n"
       "stats 'spacings.csv' using 3 nooutput\n"
       "plot 'spacings.csv' using (bin($3)):(1.0 / (STATS_records * binwidth)) smooth frequency with boxes "
       "title 'empirical', \\\n     exp(-x) title 'Poisson', \\\n     pi / 2 * x * exp(-pi * x**2 / 4) title 'Wigner surmise'\n"},
      {"dos.csv", "dos.plot",
       "set datafile separator ','\nset xlabel 'E'\nset ylabel 'density of states'\n"
       "plot 'dos.csv' using 1:($4 eq 'mc_canopy' ? $2 : 1/0):3 with yerrorbars title 'Monte Carlo', \\\n"
       "     'dos.csv' using 1:($4 eq 'exact_cauchy' ? $2 : 1/0) with lines title 'exact Cauchy'\n"},
      {"decay.csv", "decay.plot",
       "set datafile separator ','\nset xlabel 'distance'\nset ylabel 'log E|G|^s'\n"
       "f(x) = a + m * x\nfit f(x) 'decay.csv' using 1:2:3 yerrors via a, m\n"
       "plot 'decay.csv' using 1:2:3 with yerrorbars title 'log-moment', f(x) title 'fit'\n"},
      {"negligibility.csv", "negligibility.plot",
       "set datafile separator ','\nset xlabel 'L'\nset ylabel 'P(|T| sigma > epsilon)'\n"
       "plot 'negligibility.csv' using 1:2:3 with yerrorlines title 'probability'\n"},
      {"lyapunov.csv", "lyapunov.plot",
       "set datafile separator ','\nset xlabel 'E'\nset ylabel 'gamma_L'\n"
       "plot 'lyapunov.csv' using 1:2:3 with yerrorlines title 'Lyapunov exponent'\n"},
      {"dos_convergence.csv", "dos_convergence.plot",
       "set datafile separator ','\nset xlabel 'L'\nset ylabel 'relative difference'\nset logscale y\n"
       "plot 'dos_convergence.csv' using 1:6 with linespoints title '|finite - canopy| / canopy'\n"},
      {"sw_diagnostic.csv", "sw_diagnostic.plot",
       "set datafile separator ','\nset logscale xy\nset xlabel 'eta'\nset ylabel 'inverse quantity'\n"
       "plot 'sw_diagnostic.csv' using 1:($3 == 0.5 ? $2 : 1/0) with linespoints title 'canopy median'"
       "{BACKBONE}\n"},
      {"schedule.csv", "schedule.plot",
       "set datafile separator ','\nset xlabel 'n'\nset ylabel 'L_n'\n"
       "plot 'schedule.csv' using 1:2 with steps title 'depth schedule'\n"},
      {"divisibility.csv", "divisibility.plot",
       "set datafile separator ','\nset xlabel 'L'\nset ylabel 'gap'\n"
       "plot 'divisibility.csv' using 1:($2 > 0 ? $3 : 1/0):4 with yerrorlines title 'gap (N > 0)'\n"},
  };
  std::vector<std::string> written;
  for (const auto& s : scripts) {
    if (!std::filesystem::exists(dir / s.csv)) continue;
    std::string body = s.body;
    if (const auto pos = body.find("{BACKBONE}"); pos != std::string::npos)
      body.replace(pos, 10, std::filesystem::exists(dir / "sw_diagnostic_backbone.csv")
                                ? ", \\\n     'sw_diagnostic_backbone.csv' using 1:($3 == 0.5 ? $2 : 1/0) with "
                                  "linespoints title 'backbone median'"
                                : "");
    std::ofstream f(dir / s.name, std::ios::binary);
    f << "# gnuplot script; run from this directory\n" << body;
    written.push_back(s.name);
  }
  if (written.empty()) throw ConfigError(dir.string() + ": no experiment CSVs to plot");
  return written;
}

}  // namespace canopy
