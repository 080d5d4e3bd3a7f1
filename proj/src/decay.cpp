#include "canopy/decay.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <ostream>

#include "canopy/ensemble.hpp"
#include "canopy/error.hpp"
#include "canopy/resolvent.hpp"

namespace canopy {

using cplx = std::complex<double>;

namespace {

std::shared_ptr<const TreeGraph> regular(int K, int L) {
  return std::make_shared<const TreeGraph>(build_regular_tree(K, L));
}

DecayFit fit_log_means(std::vector<int> distances, const std::vector<Estimate>& means) {
  DecayFit f;
  std::vector<double> x, y, sig;
  // Deterministic input (all standard errors zero) is fitted with unit weights.
  const bool exact = std::all_of(means.begin(), means.end(), [](const Estimate& m) { return m.stderr_ == 0.0; });
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const auto& m = means[i];
    f.distances.push_back(distances[i]);
    f.log_values.push_back(m.mean > 0 ? std::log(m.mean) : -INFINITY);
    f.log_stderr.push_back(m.mean > 0 ? m.stderr_ / m.mean : INFINITY);
    if (distances[i] > 0 && m.mean > 0 && (exact || m.stderr_ > 0)) {
      x.push_back(distances[i]);
      y.push_back(f.log_values.back());
      sig.push_back(exact ? 1.0 : f.log_stderr.back());
    }
  }
  if (x.size() >= 2) {
    const auto line = weighted_line_fit(x, y, sig);
    f.rate = -line.slope;
    f.rate_stderr = line.slope_stderr;
    f.residuals = line.residuals;
  }
  return f;
}

}  // namespace

Estimate lyapunov_finite(const DisorderLaw& law, int K, double b, int L, double E, double eta,
                         std::size_t realizations, std::uint64_t seed) {
  if (eta < 0.0) throw ParameterError("lyapunov_finite: eta must be >= 0");
  const auto g = regular(K, L);
  const double half_log_k = 0.5 * std::log(static_cast<double>(K));
  const auto vals = map_realizations(realizations, [&](std::size_t r) {
    const auto op = sample_operator(g, law, b, seed, r);
    return -(half_log_k + std::log(std::abs(compute_gammas(op, {E, eta}).gamma[0])));
  });
  return mean_stderr(vals);
}

DecayFit fractional_moment_decay(const DisorderLaw& law, int K, double b, int L, double E, double eta,
                                 double s, std::size_t realizations, std::uint64_t seed) {
  if (!(s > 0.0 && s < 1.0)) throw ParameterError("fractional_moment_decay: s must lie in (0, 1)");
  if (L < 2) throw ParameterError("fractional_moment_decay: need L >= 2 for a fit");
  const auto g = regular(K, L);
  const auto ray = g->leftmost_ray();
  const auto rows = map_realizations(realizations, [&](std::size_t r) {
    const auto op = sample_operator(g, law, b, seed, r);
    const auto t = compute_gammas(op, {E, eta});
    std::vector<double> m(ray.size());
    double log_abs = 0.0;
    for (std::size_t d = 0; d < ray.size(); ++d) {
      log_abs += std::log(std::abs(t.gamma[ray[d]]));
      m[d] = std::exp(s * log_abs);
    }
    return m;
  });
  std::vector<int> dist;
  std::vector<Estimate> means;
  std::vector<double> col(realizations);
  for (std::size_t d = 0; d < ray.size(); ++d) {
    for (std::size_t r = 0; r < realizations; ++r) col[r] = rows[r][d];
    dist.push_back(static_cast<int>(d));
    means.push_back(mean_stderr(col));
  }
  DecayFit f = fit_log_means(dist, means);
  f.excess = f.rate - s * 0.5 * std::log(static_cast<double>(K));
  return f;
}

WidthQuantiles relative_width(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw ParameterError("relative_width: empty sample");
  if (!(alpha > 0.0 && alpha <= 0.5)) throw ParameterError("relative_width: alpha must lie in (0, 1/2]");
  std::vector<double> xs(samples.begin(), samples.end());
  for (double x : xs)
    if (!(x > 0.0)) throw ParameterError("relative_width: samples must be positive");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  // P(X < xi) <= alpha holds up to the floor(alpha n)-th order statistic; symmetric for xi_+.
  const auto k = std::min(n - 1, static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n))));
  WidthQuantiles w;
  w.alpha = alpha;
  w.xi_minus = xs[k];
  w.xi_plus = xs[n - 1 - k];
  if (w.xi_minus > w.xi_plus) std::swap(w.xi_minus, w.xi_plus);
  w.delta = 1.0 - w.xi_minus / w.xi_plus;
  return w;
}

LyapunovLowerBound lyapunov_lower_bound(std::span<const double> inverse_gamma_sq, int K, double rho_sup,
                                        double tau, std::span<const double> alpha_grid) {
  if (inverse_gamma_sq.empty()) throw ParameterError("lyapunov_lower_bound: empty sample");
  if (!(tau > 0.0) || !(rho_sup > 0.0)) throw ParameterError("lyapunov_lower_bound: need tau, rho_sup > 0");
  double moment = 0.0;  // E[|Gamma_0|^{-tau}] = E[X^{tau/2}]
  for (double x : inverse_gamma_sq) moment += std::pow(x, tau / 2);
  moment /= static_cast<double>(inverse_gamma_sq.size());
  const double pref = 1.0 / (32.0 * (K + 1.0) * (K + 1.0));
  LyapunovLowerBound out;
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a < 0.5)) throw ParameterError("lyapunov_lower_bound: alpha must lie in (0, 1/2)");
    const double d = relative_width(inverse_gamma_sq, a).delta;
    const double asw = pref * a * a * d * d;
    if (asw > out.asw) {
      out.asw = asw;
      out.asw_alpha = a;
    }
    const double lc = pref * a * a * std::min(1.0, (1 - 2 * a) / (2 * rho_sup)) * std::pow(a / moment, 2 / tau);
    if (lc > out.closed_form) {
      out.closed_form = lc;
      out.closed_form_alpha = a;
    }
  }
  out.value = std::max(out.asw, out.closed_form);
  return out;
}

DksLambda dks_lambda(const DisorderLaw& law) {
  if (law.family() == LawFamily::constant) throw UnsupportedError("dks_lambda: undefined for a constant law");
  auto h = [](double eta) { return 40.0 * eta * std::abs(std::log(eta)); };
  auto root = [&](double a, double b) {
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve([&](double e) { return h(e) - 1.0; }, a, b, tol, iters);
    return 0.5 * (r.first + r.second);
  };
  DksLambda out;
  const double inv_e = std::exp(-1.0);
  out.eta1 = root(1e-300, inv_e);
  out.eta2 = root(inv_e, 1.0);
  out.eta3 = root(1.0, 2.0);

  auto candidate = [&](double eta) {
    const double alpha = 1.0 - law.char_modulus_tail_sup(eta);
    const double f = 1.0 - h(eta);
    const double x = alpha / 25.0 * f * f;
    return x > 0.0 ? -2.0 / std::log1p(-x) : INFINITY;
  };
  out.lambda = INFINITY;
  auto consider = [&](double eta, double val) {
    if (val < out.lambda && h(eta) < 1.0) {
      out.lambda = val;
      out.eta_star = eta;
    }
  };
  // |log eta| has a kink at eta = 1, so (eta2, eta3) is split there; each piece is
  // scanned coarsely to bracket the minimum and then refined by Brent's method.
  consider(1.0, candidate(1.0));
  const double tiny = out.eta1 * 1e-12;
  for (auto [a, b] : {std::pair{tiny, out.eta1}, std::pair{out.eta2, 1.0}, std::pair{1.0, out.eta3}}) {
    constexpr int kScan = 400;
    const bool log_scale = a == tiny;
    std::vector<double> pts;
    for (int i = 1; i < kScan; ++i)
      pts.push_back(log_scale ? a * std::pow(b / a, double(i) / kScan) : a + (b - a) * i / kScan);
    std::size_t best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (candidate(pts[i]) < candidate(pts[best])) best = i;
    consider(pts[best], candidate(pts[best]));
    const double bl = best == 0 ? a : pts[best - 1];
    const double br = best + 1 == pts.size() ? b : pts[best + 1];
    const auto m = boost::math::tools::brent_find_minima(candidate, bl, br, 50);
    consider(m.first, m.second);
  }
  return out;
}

CorrelatorFit eigenfunction_correlator(std::span<const EigenSystem> ensemble, const TreeGraph& g, Vertex x,
                                       std::span<const Vertex> ys, double lo, double hi) {
  if (ensemble.empty()) throw ParameterError("eigenfunction_correlator: empty ensemble");
  CorrelatorFit out;
  for (Vertex y : ys) {
    std::vector<double> vals;
    for (const auto& e : ensemble) {
      if (!e.has_vectors()) throw ParameterError("eigenfunction_correlator needs eigenvectors");
      double s = 0.0;
      for (std::size_t k = 0; k < e.n; ++k)
        if (e.values[k] >= lo && e.values[k] <= hi) s += std::abs(e.component(k, x)) * std::abs(e.component(k, y));
      vals.push_back(s);
    }
    out.distances.push_back(tree_distance(g, x, y));
    out.values.push_back(mean_stderr(vals));
  }
  out.fit = fit_log_means(out.distances, out.values);
  return out;
}

double backbone_lambda_lower(double moment, double E0, double K_prime, double Cs) {
  const double arg = 1.0 + E0 + moment + K_prime * Cs;
  if (!(arg > 0.0)) throw ParameterError("backbone_lambda_lower: log argument must be > 0");
  return 1.0 + std::log(arg);
}

double backbone_lambda_lower(double s, double E0, const DisorderLaw& law, double K_prime, double Cs) {
  const double cap = std::min(law.moment_exponent_limit(), 0.5);
  if (!(s > 0.0) || s > cap) throw ParameterError("backbone_lambda_lower: need 0 < s <= min(tau, 1/2)");
  return backbone_lambda_lower(law.abs_moment(s), E0, K_prime, Cs);
}

double estimate_Cs(const DisorderLaw& law, int K, double b, double s, std::span<const cplx> z_grid,
                   std::span<const int> L_grid, std::size_t realizations, std::uint64_t seed) {
  double best = 0.0;
  for (int L : L_grid) {
    const auto g = regular(K, L);
    const auto rows = map_realizations(realizations, [&](std::size_t r) {
      const auto op = sample_operator(g, law, b, seed, r);
      const auto batch = compute_gammas(op, z_grid);
      std::vector<double> m(z_grid.size());
      for (std::size_t j = 0; j < z_grid.size(); ++j) m[j] = std::pow(std::abs(batch.at(0, j)), s);
      return m;
    });
    for (std::size_t j = 0; j < z_grid.size(); ++j) {
      double acc = 0.0;
      for (const auto& row : rows) acc += row[j];
      best = std::max(best, acc / static_cast<double>(realizations));
    }
  }
  return best;
}

Estimate sc_integral(const DisorderLaw& law, int K, int L, double lo, double hi, double tau_prime,
                     std::size_t realizations, std::uint64_t seed) {
  using Rule = boost::math::quadrature::gauss<double, 16>;
  if (!(hi > lo)) throw ParameterError("sc_integral: empty energy interval");
  std::vector<cplx> z;
  std::vector<double> w;
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const auto& x = Rule::abscissa();
  const auto& wt = Rule::weights();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (double sign : {-1.0, 1.0}) {
      z.emplace_back(mid + sign * half * x[i], kScheduleEta);
      w.push_back(half * wt[i]);
    }
  const auto g = regular(K, L);
  const auto vals = map_realizations(realizations, [&](std::size_t r) {
    const auto op = sample_operator(g, law, 0.0, seed, r);
    const auto batch = compute_gammas(op, z);
    double acc = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      // <delta_0, [(H-E)^2 + eta^2]^{-1} delta_0> = Im G / eta
      const double q = batch.at(0, j).imag() / kScheduleEta;
      acc += w[j] * std::pow(q, -tau_prime);
    }
    return acc;
  });
  return mean_stderr(vals);
}

DepthSchedule sc_depth_schedule(const DisorderLaw& law, int K, double lo, double hi, double tau_prime,
                                double lambda_target, int n_max, int L_cap, std::size_t realizations,
                                std::uint64_t seed) {
  const double cap = std::min(law.moment_exponent_limit(), 0.5) / 2;
  if (!(tau_prime > 0.0) || tau_prime > cap) throw ParameterError("sc_depth_schedule: need 0 < tau' <= min(tau,1/2)/2");
  if (n_max < 0 || L_cap < 0) throw ParameterError("sc_depth_schedule: need n_max, L_cap >= 0");
  DepthSchedule out;
  out.integral_by_L.assign(static_cast<std::size_t>(L_cap) + 1, NAN);
  auto integral = [&](int L) {
    auto& slot = out.integral_by_L[static_cast<std::size_t>(L)];
    if (std::isnan(slot)) slot = sc_integral(law, K, L, lo, hi, tau_prime, realizations, seed).mean;
    return slot;
  };
  int L = 0;
  for (int n = 0; n <= n_max; ++n) {
    const double thr = std::exp(-2.0 * lambda_target * n);
    while (L < L_cap && integral(L) > thr) ++L;
    out.depths.push_back(L);
    out.capped.push_back(integral(L) > thr);
    out.thresholds.push_back(thr);
    out.integrals.push_back(integral(L));
  }
  return out;
}

std::vector<double> square_summability_diagnostic(const OperatorSample& op, Vertex x0, double E,
                                                  std::span<const double> eta_ladder) {
  std::vector<double> out;
  for (double eta : eta_ladder) out.push_back(1.0 / column_norm_sq(op, x0, {E, eta}));
  return out;
}

void write_decay_csv(std::ostream& out, const DecayFit& f) {
  const auto old = out.precision(17);
  out << "distance,log_moment,stderr\n";
  for (std::size_t i = 0; i < f.distances.size(); ++i)
    out << f.distances[i] << ',' << f.log_values[i] << ',' << f.log_stderr[i] << '\n';
  out.precision(old);
}

}  // namespace canopy
