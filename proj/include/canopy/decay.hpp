#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "canopy/disorder.hpp"
#include "canopy/graphs.hpp"
#include "canopy/operator.hpp"
#include "canopy/spectral.hpp"
#include "canopy/stats.hpp"

namespace canopy {

/// Log-moments against distance with a weighted least-squares decay rate.
struct DecayFit {
  std::vector<int> distances;
  std::vector<double> log_values;
  std::vector<double> log_stderr;
  double rate = 0.0;         // negated slope
  double rate_stderr = 0.0;
  std::vector<double> residuals;
  /// rate - s ln sqrt(K) for fractional-moment fits (0 otherwise).
  double excess = 0.0;
};

/// gamma_L(E + i eta) = -E[ln(sqrt(K) |G(0,0)|)] with its standard error. eta = 0 is
/// allowed (singular energies are a null event for continuous laws).
Estimate lyapunov_finite(const DisorderLaw& law, int K, double b, int L, double E, double eta,
                         std::size_t realizations, std::uint64_t seed);

/// E|G(0, x_d; E + i eta)|^s along the leftmost root-to-boundary ray, d = 0..L,
/// fitted over d >= 1.
DecayFit fractional_moment_decay(const DisorderLaw& law, int K, double b, int L, double E, double eta,
                                 double s, std::size_t realizations, std::uint64_t seed);

struct WidthQuantiles {
  double alpha = 0.25;
  double xi_minus = 0.0;
  double xi_plus = 0.0;
  double delta = 0.0;
};
/// Empirical relative alpha-width delta = 1 - xi_-/xi_+.
WidthQuantiles relative_width(std::span<const double> samples, double alpha);

struct LyapunovLowerBound {
  double asw = 0.0;          // max_alpha alpha^2/(32(K+1)^2) delta(X, alpha)^2
  double asw_alpha = 0.0;
  double closed_form = 0.0;  // l(I)
  double closed_form_alpha = 0.0;
  double value = 0.0;        // max of the two
};
/// `inverse_gamma_sq` are draws of |Gamma_0(z)|^{-2}.
LyapunovLowerBound lyapunov_lower_bound(std::span<const double> inverse_gamma_sq, int K, double rho_sup,
                                        double tau, std::span<const double> alpha_grid);

struct DksLambda {
  double lambda = 0.0;
  double eta_star = 0.0;
  /// Admissible set (0, eta1) U (eta2, eta3) of 40 eta |log eta| < 1.
  double eta1 = 0.0, eta2 = 0.0, eta3 = 0.0;
};
DksLambda dks_lambda(const DisorderLaw& law);

struct CorrelatorFit {
  std::vector<int> distances;
  std::vector<Estimate> values;
  DecayFit fit;
};
/// E[sum_{E_n in I} |psi_n(x)| |psi_n(y)|] for every y in `ys`, with a decay fit
/// over the distances d(x, y) > 0.
CorrelatorFit eigenfunction_correlator(std::span<const EigenSystem> ensemble, const TreeGraph& g, Vertex x,
                                       std::span<const Vertex> ys, double lo, double hi);

/// 1 + log(1 + E0 + E|w|^s + K' C_s).
double backbone_lambda_lower(double s, double E0, const DisorderLaw& law, double K_prime, double Cs);
double backbone_lambda_lower(double moment, double E0, double K_prime, double Cs);

/// Empirical sup over a probe grid of E|G(0,0; z)|^s on regular trees of depth L.
double estimate_Cs(const DisorderLaw& law, int K, double b, double s, std::span<const std::complex<double>> z_grid,
                   std::span<const int> L_grid, std::size_t realizations, std::uint64_t seed);

struct DepthSchedule {
  std::vector<int> depths;
  std::vector<bool> capped;
  std::vector<double> thresholds;
  /// integral estimate at the chosen depth for every n
  std::vector<double> integrals;
  /// integral estimate for every probed L (index L)
  std::vector<double> integral_by_L;
};
inline constexpr double kScheduleEta = 1e-3;
/// Minimal depths L_n <= L_cap with int_I E[<delta_0,[(H-E)^2+eta^2]^{-1} delta_0>^{-tau'}] dE
/// <= exp(-2 lambda n), non-decreasing in n.
DepthSchedule sc_depth_schedule(const DisorderLaw& law, int K, double lo, double hi, double tau_prime,
                                double lambda_target, int n_max, int L_cap, std::size_t realizations,
                                std::uint64_t seed);
/// The integral above for one depth L (MC over realizations, 16-node Gauss-Legendre over I).
Estimate sc_integral(const DisorderLaw& law, int K, int L, double lo, double hi, double tau_prime,
                     std::size_t realizations, std::uint64_t seed);

/// <delta_x0, [(H - E)^2 + eta^2]^{-1} delta_x0>^{-1} for each eta of the ladder.
std::vector<double> square_summability_diagnostic(const OperatorSample& op, Vertex x0, double E,
                                                  std::span<const double> eta_ladder);

void write_decay_csv(std::ostream& out, const DecayFit& f);

}  // namespace canopy
