#include "canopy/levelstats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "canopy/ensemble.hpp"
#include "canopy/error.hpp"
#include "canopy/resolvent.hpp"

namespace canopy {

SpacingSample spacing_statistics(std::span<const RescaledPointProcess> processes) {
  SpacingSample s;
  for (std::size_t r = 0; r < processes.size(); ++r) {
    const auto& p = processes[r].points;
    for (std::size_t i = 1; i < p.size(); ++i) {
      s.spacings.push_back(p[i] - p[i - 1]);
      s.source.push_back(r);
    }
  }
  if (s.spacings.empty()) throw ParameterError("spacing_statistics: no process has two points");
  double sum = 0.0;
  for (double x : s.spacings) sum += x;
  s.raw_mean = sum / static_cast<double>(s.spacings.size());
  if (!(s.raw_mean > 0.0)) throw ParameterError("spacing_statistics: all spacings vanish");
  for (double& x : s.spacings) x /= s.raw_mean;
  return s;
}

double reference_cdf(SpacingReference ref, double s) {
  if (s <= 0.0) return 0.0;
  switch (ref) {
    case SpacingReference::exponential_unit_mean: return -std::expm1(-s);
    case SpacingReference::wigner_goe_surmise: return -std::expm1(-std::numbers::pi * s * s / 4);
  }
  return 0.0;
}

double ks_distance(std::span<const double> sample, SpacingReference ref) {
  if (sample.empty()) throw ParameterError("ks_distance: empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = reference_cdf(ref, xs[i]);
    d = std::max({d, std::abs(F - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - F)});
  }
  return d;
}

WegnerMinamiReport wegner_minami_check(std::span<const std::size_t> counts, double lo, double hi,
                                       const DisorderLaw& law, std::size_t volume) {
  if (counts.size() < 100) throw ParameterError("wegner_minami_check needs >= 100 realizations");
  WegnerMinamiReport rep;
  rep.realizations = counts.size();
  std::vector<double> n1, n2;
  for (std::size_t c : counts) {
    const double x = static_cast<double>(c);
    n1.push_back(x);
    n2.push_back(x * (x - 1));
  }
  rep.count = mean_stderr(n1);
  rep.factorial_moment = mean_stderr(n2);
  if (law.family() == LawFamily::constant) {
    rep.applicable = false;
    return rep;
  }
  const double len = hi - lo;
  const double rho = law.density_sup();
  const double vol = static_cast<double>(volume);
  rep.wegner_bound = len * vol * rho;
  rep.minami_bound = std::numbers::pi * std::numbers::pi * len * len * vol * vol * rho * rho;
  rep.wegner_ok = rep.count.mean <= rep.wegner_bound + 3 * rep.count.stderr_;
  rep.minami_ok = rep.factorial_moment.mean <= rep.minami_bound + 3 * rep.factorial_moment.stderr_;
  return rep;
}

WegnerMinamiReport wegner_minami_check(std::span<const EigenSystem> ensemble, double lo, double hi,
                                       const DisorderLaw& law, std::size_t volume) {
  std::vector<std::size_t> counts;
  for (const auto& e : ensemble)
    counts.push_back(static_cast<std::size_t>(
        std::count_if(e.values.begin(), e.values.end(), [&](double v) { return v >= lo && v <= hi; })));
  return wegner_minami_check(counts, lo, hi, law, volume);
}

CountStatistics count_distribution(std::span<const RescaledPointProcess> processes, double lo,
                                   double hi, double intensity) {
  if (processes.size() < 200) throw ParameterError("count_distribution needs >= 200 realizations");
  if (hi < lo) throw ParameterError("count_distribution: empty interval orientation");
  CountStatistics c;
  c.lo = lo;
  c.hi = hi;
  c.intensity = intensity;
  c.poisson_mean = intensity * (hi - lo);
  std::size_t kmax = 0;
  for (const auto& p : processes) {
    const auto n = static_cast<std::size_t>(
        std::count_if(p.points.begin(), p.points.end(), [&](double x) { return x >= lo && x < hi; }));
    c.counts.push_back(n);
    kmax = std::max(kmax, n);
  }
  c.pmf.assign(kmax + 1, 0.0);
  for (std::size_t n : c.counts) c.pmf[n] += 1.0;
  for (double& p : c.pmf) p /= static_cast<double>(c.counts.size());

  double tv = 0.0;
  double covered = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    const double q = poisson_pmf(k, c.poisson_mean);
    tv += std::abs(c.pmf[k] - q);
    covered += q;
  }
  // Poisson mass beyond the largest observed count is unmatched.
  tv += std::max(0.0, 1.0 - covered);
  c.tv_distance = 0.5 * tv;
  return c;
}

std::vector<NegligibilityPoint> negligibility_curve(const DisorderLaw& law, int K, double b, double E,
                                                    double w, double epsilon,
                                                    std::span<const int> L_list,
                                                    std::size_t realizations, std::uint64_t seed) {
  if (realizations == 0) throw ParameterError("negligibility_curve: realizations must be >= 1");
  std::vector<NegligibilityPoint> out;
  for (int L : L_list) {
    auto g = std::make_shared<const TreeGraph>(build_regular_tree(K, L));
    const double vol = static_cast<double>(g->vertex_count());
    const auto hits = map_realizations(realizations, [&](std::size_t r) -> int {
      if (!(w > 0.0)) return 0;
      const auto op = sample_operator(g, law, b, seed, r);
      const double half = w / vol;
      auto values = tree_eigenvalues_in(op, E - half, std::nextafter(E + half, INFINITY));
      const auto weights = root_spectral_weights(op, values);
      double sigma = 0.0;
      for (double x : weights) sigma += x;
      return vol * sigma > epsilon ? 1 : 0;
    });
    NegligibilityPoint pt;
    pt.L = L;
    pt.realizations = realizations;
    double k = 0;
    for (int h : hits) k += h;
    pt.probability = k / static_cast<double>(realizations);
    pt.stderr_ = std::sqrt(pt.probability * (1 - pt.probability) / static_cast<double>(realizations));
    out.push_back(pt);
  }
  return out;
}

namespace {

// sum over eigenvalues of Im 1/(|T|(E_n - E) - z) = Im Tr (H - E - z/|T|)^{-1} / |T|.
double rescaled_stieltjes(const OperatorSample& op, double E, std::complex<double> z, double vol) {
  return resolvent_trace(op, E + z / vol).imag() / vol;
}

}  // namespace

DivisibilityTerms divisibility_terms(const OperatorSample& op, int N, double E, std::complex<double> z) {
  if (!(z.imag() > 0.0)) throw ParameterError("divisibility_terms: Im z must be > 0");
  const TreeGraph& g = op.tree_graph();
  if (N < 0 || N > g.depth_parameter()) throw ParameterError("divisibility_terms: N must lie in [0, L]");
  const double vol = static_cast<double>(op.vertex_count());
  DivisibilityTerms t;
  t.full = rescaled_stieltjes(op, E, z, vol);
  if (N == 0) {
    t.subtrees = t.full;
    return t;
  }
  for (Vertex x : g.vertices_at_depth(N)) t.subtrees += rescaled_stieltjes(restrict_to_subtree(op, x), E, z, vol);
  return t;
}

DivisibilityGap divisibility_gap(std::span<const DivisibilityTerms> terms) {
  if (terms.empty()) throw ParameterError("divisibility_gap: empty ensemble");
  std::vector<double> a, b, d;
  for (const auto& t : terms) {
    a.push_back(std::exp(-t.full));
    b.push_back(std::exp(-t.subtrees));
    d.push_back(a.back() - b.back());
  }
  DivisibilityGap g;
  g.mean_full = mean_stderr(a).mean;
  g.mean_subtrees = mean_stderr(b).mean;
  const auto diff = mean_stderr(d);
  g.gap = std::abs(diff.mean);
  g.stderr_ = diff.stderr_;
  return g;
}

DivisibilityGap divisibility_gap(std::span<const OperatorSample> ensemble, int N, double E,
                                 std::complex<double> z) {
  const auto terms = map_realizations(ensemble.size(), [&](std::size_t r) {
    return divisibility_terms(ensemble[r], N, E, z);
  });
  return divisibility_gap(terms);
}

Estimate eigenfunction_mass_statistic(std::span<const EigenSystem> ensemble, std::size_t x, double lo,
                                      double hi, double epsilon) {
  std::vector<double> counts;
  for (const auto& e : ensemble) {
    if (!e.has_vectors()) throw ParameterError("eigenfunction_mass_statistic needs eigenvectors");
    const double thr = epsilon / static_cast<double>(e.n);
    double c = 0;
    for (std::size_t k = 0; k < e.n; ++k) {
      const double p = e.component(k, x);
      if (e.values[k] >= lo && e.values[k] <= hi && p * p >= thr) c += 1;
    }
    counts.push_back(c);
  }
  return mean_stderr(counts);
}

std::size_t root_mass_count(const OperatorSample& op, double lo, double hi, double epsilon) {
  const auto values = tree_eigenvalues_in(op, lo, std::nextafter(hi, INFINITY));
  const auto weights = root_spectral_weights(op, values);
  const double thr = epsilon / static_cast<double>(op.vertex_count());
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [&](double p) { return p >= thr; }));
}

void write_spacings_csv(std::ostream& out, const SpacingSample& s) {
  const auto old = out.precision(17);
  out << "realization,index,spacing\n";
  std::size_t idx = 0;
  for (std::size_t i = 0; i < s.spacings.size(); ++i) {
    if (i > 0 && s.source[i] != s.source[i - 1]) idx = 0;
    out << s.source[i] << ',' << idx++ << ',' << s.spacings[i] << '\n';
  }
  out.precision(old);
}

void write_counts_csv(std::ostream& out, const CountStatistics& c) {
  out << "realization,count\n";
  for (std::size_t r = 0; r < c.counts.size(); ++r) out << r << ',' << c.counts[r] << '\n';
}

void write_negligibility_csv(std::ostream& out, std::span<const NegligibilityPoint> curve) {
  const auto old = out.precision(17);
  out << "L,probability,stderr\n";
  for (const auto& p : curve) out << p.L << ',' << p.probability << ',' << p.stderr_ << '\n';
  out.precision(old);
}

}  // namespace canopy
