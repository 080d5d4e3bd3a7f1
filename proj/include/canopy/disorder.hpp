#pragma once

#include <string>
#include <vector>

#include "canopy/rng.hpp"

namespace canopy {

enum class LawFamily { cauchy, uniform, gaussian, constant };

/// Single-site distribution of the random potential.
///
/// Parameters by family: cauchy(center, scale), uniform(lower, upper),
/// gaussian(mean, variance), constant(value). All non-constant laws have a bounded
/// density and some finite absolute moment.
class DisorderLaw {
 public:
  static DisorderLaw cauchy(double center, double scale);
  static DisorderLaw uniform(double lower, double upper);
  static DisorderLaw gaussian(double mean, double variance);
  static DisorderLaw constant(double value);
  /// From the config triple {type, p1, p2}; p2 ignored for constant.
  static DisorderLaw from_spec(const std::string& type, double p1, double p2);

  LawFamily family() const { return family_; }
  double p1() const { return p1_; }
  double p2() const { return p2_; }
  std::string name() const;

  double density(double omega) const;
  double density_sup() const;
  double cdf(double omega) const;
  /// Absolute moment E|omega|^tau. Throws UnsupportedError when it diverges.
  double abs_moment(double tau) const;
  bool has_finite_moment(double tau) const;
  /// A moment exponent for which the law satisfies the moment condition, used to
  /// validate exponents downstream: cauchy 1/2 (any tau < 1 works), others 2.
  double moment_exponent() const;
  /// Supremum of admissible moment exponents (exclusive for cauchy).
  double moment_exponent_limit() const;
  /// |rho_hat(xi)| with rho_hat(xi) = int exp(-i xi w) rho(w) dw.
  double char_modulus(double xi) const;
  /// sup_{|xi| > eta} |rho_hat(xi)|.
  double char_modulus_tail_sup(double eta) const;

  double draw(Rng& rng) const;
  std::vector<double> sample(Rng& rng, std::size_t n) const;

 private:
  DisorderLaw(LawFamily f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}
  void require_density(const char* op) const;

  LawFamily family_;
  double p1_;
  double p2_;
};

}  // namespace canopy
