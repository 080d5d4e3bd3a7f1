#include "canopy/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "canopy/error.hpp"

namespace canopy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTol = 1e-8;

double sinc_abs(double t) {
  if (t == 0.0) return 1.0;
  return std::abs(std::sin(t) / t);
}

}  // namespace

DisorderLaw DisorderLaw::cauchy(double center, double scale) {
  if (!(scale > 0.0)) throw ParameterError("cauchy scale must be > 0");
  return {LawFamily::cauchy, center, scale};
}

DisorderLaw DisorderLaw::uniform(double lower, double upper) {
  if (!(upper > lower)) throw ParameterError("uniform law needs lower < upper");
  return {LawFamily::uniform, lower, upper};
}

DisorderLaw DisorderLaw::gaussian(double mean, double variance) {
  if (!(variance > 0.0)) throw ParameterError("gaussian variance must be > 0");
  return {LawFamily::gaussian, mean, variance};
}

DisorderLaw DisorderLaw::constant(double value) { return {LawFamily::constant, value, 0.0}; }

DisorderLaw DisorderLaw::from_spec(const std::string& type, double p1, double p2) {
  if (type == "cauchy") return cauchy(p1, p2);
  if (type == "uniform") return uniform(p1, p2);
  if (type == "gaussian") return gaussian(p1, p2);
  if (type == "constant") return constant(p1);
  throw ParameterError("unknown distribution type '" + type + "'");
}

std::string DisorderLaw::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case LawFamily::cauchy: os << "cauchy(" << p1_ << "," << p2_ << ")"; break;
    case LawFamily::uniform: os << "uniform(" << p1_ << "," << p2_ << ")"; break;
    case LawFamily::gaussian: os << "gaussian(" << p1_ << "," << p2_ << ")"; break;
    case LawFamily::constant: os << "constant(" << p1_ << ")"; break;
  }
  return os.str();
}

void DisorderLaw::require_density(const char* op) const {
  if (family_ == LawFamily::constant)
    throw UnsupportedError(std::string(op) + ": constant law has no density");
}

double DisorderLaw::density(double w) const {
  require_density("density");
  switch (family_) {
    case LawFamily::cauchy: {
      const double t = (w - p1_) / p2_;
      return 1.0 / (kPi * p2_ * (1.0 + t * t));
    }
    case LawFamily::uniform: return (w >= p1_ && w <= p2_) ? 1.0 / (p2_ - p1_) : 0.0;
    case LawFamily::gaussian: {
      const double d = w - p1_;
      return std::exp(-d * d / (2.0 * p2_)) / std::sqrt(2.0 * kPi * p2_);
    }
    case LawFamily::constant: break;
  }
  return 0.0;
}

double DisorderLaw::density_sup() const {
  require_density("density_sup");
  switch (family_) {
    case LawFamily::cauchy: return 1.0 / (kPi * p2_);
    case LawFamily::uniform: return 1.0 / (p2_ - p1_);
    case LawFamily::gaussian: return 1.0 / std::sqrt(2.0 * kPi * p2_);
    case LawFamily::constant: break;
  }
  return 0.0;
}

double DisorderLaw::cdf(double w) const {
  switch (family_) {
    case LawFamily::cauchy: return 0.5 + std::atan((w - p1_) / p2_) / kPi;
    case LawFamily::uniform: return std::clamp((w - p1_) / (p2_ - p1_), 0.0, 1.0);
    case LawFamily::gaussian: return 0.5 * std::erfc(-(w - p1_) / std::sqrt(2.0 * p2_));
    case LawFamily::constant: return w < p1_ ? 0.0 : 1.0;
  }
  return 0.0;
}

double DisorderLaw::moment_exponent() const {
  return family_ == LawFamily::cauchy ? 0.5 : 2.0;
}

double DisorderLaw::moment_exponent_limit() const {
  return family_ == LawFamily::cauchy ? 1.0 : std::numeric_limits<double>::infinity();
}

bool DisorderLaw::has_finite_moment(double tau) const {
  return tau > 0.0 && (family_ != LawFamily::cauchy || tau < 1.0);
}

double DisorderLaw::abs_moment(double tau) const {
  if (!(tau > 0.0)) throw ParameterError("abs_moment: tau must be > 0");
  if (!has_finite_moment(tau))
    throw UnsupportedError("abs_moment: E|w|^tau diverges for " + name() + " at tau=" +
                           std::to_string(tau));
  switch (family_) {
    case LawFamily::constant: return std::pow(std::abs(p1_), tau);
    case LawFamily::uniform: {
      auto F = [tau](double x) { return std::copysign(std::pow(std::abs(x), tau + 1), x) / (tau + 1); };
      return (F(p2_) - F(p1_)) / (p2_ - p1_);
    }
    case LawFamily::gaussian: {
      const double sigma = std::sqrt(p2_);
      if (p1_ == 0.0)
        return std::pow(sigma, tau) * std::pow(2.0, tau / 2) * std::tgamma((tau + 1) / 2) /
               std::sqrt(kPi);
      // |mu + sigma x|^tau against the standard normal, split at the kink.
      const double x0 = -p1_ / sigma;
      auto f = [&](double x) {
        return std::pow(std::abs(p1_ + sigma * x), tau) * std::exp(-0.5 * x * x) /
               std::sqrt(2.0 * kPi);
      };
      boost::math::quadrature::exp_sinh<double> integrator;
      const double right = integrator.integrate([&](double t) { return f(x0 + t); }, kQuadTol);
      const double left = integrator.integrate([&](double t) { return f(x0 - t); }, kQuadTol);
      return right + left;
    }
    case LawFamily::cauchy: {
      if (p1_ == 0.0) return std::pow(p2_, tau) / std::cos(kPi * tau / 2);
      // w = c + gamma tan(theta) maps the law to uniform theta on (-pi/2, pi/2).
      const double theta0 = std::atan(-p1_ / p2_);
      auto f = [&](double th) { return std::pow(std::abs(p1_ + p2_ * std::tan(th)), tau) / kPi; };
      boost::math::quadrature::tanh_sinh<double> integrator;
      return integrator.integrate(f, -kPi / 2, theta0, kQuadTol) +
             integrator.integrate(f, theta0, kPi / 2, kQuadTol);
    }
  }
  return 0.0;
}

double DisorderLaw::char_modulus(double xi) const {
  require_density("char_modulus");
  switch (family_) {
    case LawFamily::cauchy: return std::exp(-p2_ * std::abs(xi));
    case LawFamily::gaussian: return std::exp(-p2_ * xi * xi / 2);
    case LawFamily::uniform: return sinc_abs(xi * (p2_ - p1_) / 2);
    case LawFamily::constant: break;
  }
  return 1.0;
}

double DisorderLaw::char_modulus_tail_sup(double eta) const {
  require_density("char_modulus_tail_sup");
  eta = std::abs(eta);
  if (family_ != LawFamily::uniform) return char_modulus(eta);
  // |sinc| beyond t0: either decreasing at t0 or the next side lobe peak, which lies
  // within pi of t0; later lobes are lower.
  const double h = (p2_ - p1_) / 2;
  const double t0 = eta * h;
  constexpr int kSteps = 20000;
  const double span = 2 * kPi;
  double best = sinc_abs(t0);
  double best_t = t0;
  for (int i = 1; i <= kSteps; ++i) {
    const double t = t0 + span * i / kSteps;
    const double v = sinc_abs(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  if (best_t > t0) {
    double a = std::max(t0, best_t - span / kSteps);
    double b = best_t + span / kSteps;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 80; ++it) {
      const double c = b - g * (b - a);
      const double d = a + g * (b - a);
      if (sinc_abs(c) > sinc_abs(d)) b = d; else a = c;
    }
    best = std::max(best, sinc_abs((a + b) / 2));
  }
  return best;
}

double DisorderLaw::draw(Rng& rng) const {
  switch (family_) {
    case LawFamily::cauchy: return p1_ + p2_ * std::tan(kPi * (rng.uniform_open() - 0.5));
    case LawFamily::uniform: return p1_ + (p2_ - p1_) * rng.uniform_open();
    case LawFamily::gaussian: return p1_ + std::sqrt(p2_) * rng.normal();
    case LawFamily::constant: return p1_;
  }
  return 0.0;
}

std::vector<double> DisorderLaw::sample(Rng& rng, std::size_t n) const {
  std::vector<double> out(n);
  for (auto& w : out) w = draw(rng);
  return out;
}

}  // namespace canopy
