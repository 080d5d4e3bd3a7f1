#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "canopy/disorder.hpp"
#include "canopy/operator.hpp"
#include "canopy/spectral.hpp"
#include "canopy/stats.hpp"

namespace canopy {

/// Pooled nearest-neighbour spacings normalized to unit mean.
struct SpacingSample {
  std::vector<double> spacings;
  /// Index of the process each spacing came from.
  std::vector<std::size_t> source;
  /// Mean spacing before normalization (1 / local intensity).
  double raw_mean = 0.0;
};

SpacingSample spacing_statistics(std::span<const RescaledPointProcess> processes);

enum class SpacingReference { exponential_unit_mean, wigner_goe_surmise };

/// 1 - exp(-s) or 1 - exp(-pi s^2 / 4).
double reference_cdf(SpacingReference ref, double s);
/// Kolmogorov distance between the empirical CDF of `sample` and the reference CDF.
double ks_distance(std::span<const double> sample, SpacingReference ref);

struct WegnerMinamiReport {
  bool applicable = true;
  std::size_t realizations = 0;
  Estimate count;              // E[N_I]
  Estimate factorial_moment;   // E[N_I (N_I - 1)]
  double wegner_bound = 0.0;   // |I| |T| ||rho||_inf
  double minami_bound = 0.0;   // pi^2 |I|^2 |T|^2 ||rho||_inf^2
  bool wegner_ok = true;
  bool minami_ok = true;
};

/// Empirical Wegner/Minami check from per-realization eigenvalue counts in I = [lo, hi].
WegnerMinamiReport wegner_minami_check(std::span<const std::size_t> counts, double lo, double hi,
                                       const DisorderLaw& law, std::size_t volume);
/// Same, counting eigenvalues of an ensemble of eigensystems.
WegnerMinamiReport wegner_minami_check(std::span<const EigenSystem> ensemble, double lo, double hi,
                                       const DisorderLaw& law, std::size_t volume);

struct CountStatistics {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
  std::vector<double> pmf;
  double intensity = 0.0;
  double poisson_mean = 0.0;
  double tv_distance = 0.0;
};

/// Counts of points in the rescaled interval [lo, hi) per process, and their total
/// variation distance to Poisson(intensity * (hi - lo)).
CountStatistics count_distribution(std::span<const RescaledPointProcess> processes, double lo,
                                   double hi, double intensity);

struct NegligibilityPoint {
  int L = 0;
  double probability = 0.0;
  double stderr_ = 0.0;
  std::size_t realizations = 0;
};

/// P(|T_L| sigma_{0,L}(E +- w/|T_L|) > epsilon) per L, with binomial standard errors.
/// The root spectral measure is evaluated from the eigenvalues in the window (Sturm
/// multisection) and their residue weights.
std::vector<NegligibilityPoint> negligibility_curve(const DisorderLaw& law, int K, double b, double E,
                                                    double w, double epsilon,
                                                    std::span<const int> L_list,
                                                    std::size_t realizations, std::uint64_t seed);

/// mu_L(phi_z) and sum_x mu_{x,L}(phi_z) for one realization, where
/// mu(phi_z) = sum over points p of Im 1/(p - z).
struct DivisibilityTerms {
  double full = 0.0;
  double subtrees = 0.0;
};
DivisibilityTerms divisibility_terms(const OperatorSample& op, int N, double E, std::complex<double> z);

struct DivisibilityGap {
  double gap = 0.0;
  double stderr_ = 0.0;
  double mean_full = 0.0;      // E[exp(-mu_L(phi_z))]
  double mean_subtrees = 0.0;  // E[exp(-sum_x mu_{x,L}(phi_z))]
};
DivisibilityGap divisibility_gap(std::span<const DivisibilityTerms> terms);
DivisibilityGap divisibility_gap(std::span<const OperatorSample> ensemble, int N, double E,
                                 std::complex<double> z);

/// E[#{n : E_n in [lo, hi], |psi_n(x)|^2 >= epsilon / |T|}] over an ensemble with vectors.
Estimate eigenfunction_mass_statistic(std::span<const EigenSystem> ensemble, std::size_t x, double lo,
                                      double hi, double epsilon);
/// The same count at the root of a tree operator, from residue weights.
std::size_t root_mass_count(const OperatorSample& op, double lo, double hi, double epsilon);

void write_spacings_csv(std::ostream& out, const SpacingSample& s);
void write_counts_csv(std::ostream& out, const CountStatistics& c);
void write_negligibility_csv(std::ostream& out, std::span<const NegligibilityPoint> curve);

}  // namespace canopy
