#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "canopy/disorder.hpp"
#include "canopy/error.hpp"

using namespace canopy;
using std::numbers::pi;

namespace {

double integrate(const DisorderLaw& law, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double w) { return law.density(w); }, a, b, 15, 1e-12);
}

}  // namespace

TEST_CASE("densities and sup norms") {
  CHECK(DisorderLaw::uniform(0, 1).density(0.5) == doctest::Approx(1.0));
  CHECK(DisorderLaw::cauchy(0, 1).density(0) == doctest::Approx(1 / pi));
  CHECK(DisorderLaw::gaussian(0, 1).density(0) == doctest::Approx(1 / std::sqrt(2 * pi)));
  CHECK(DisorderLaw::uniform(0, 1).density_sup() == doctest::Approx(1.0));
  CHECK(DisorderLaw::cauchy(0, 2).density_sup() == doctest::Approx(1 / (2 * pi)));
  CHECK(DisorderLaw::gaussian(0, 1).density_sup() == doctest::Approx(1 / std::sqrt(2 * pi)));
  CHECK_THROWS_AS(DisorderLaw::constant(1).density(0), UnsupportedError);
  CHECK_THROWS_AS(DisorderLaw::constant(1).density_sup(), UnsupportedError);
  CHECK_THROWS_AS(DisorderLaw::cauchy(0, 0), ParameterError);
  CHECK_THROWS_AS(DisorderLaw::uniform(1, 1), ParameterError);
  CHECK_THROWS_AS(DisorderLaw::gaussian(0, -1), ParameterError);
}

TEST_CASE("densities integrate to one") {
  CHECK(integrate(DisorderLaw::uniform(-1, 2), -1, 2) >= 1 - 1e-6);
  CHECK(integrate(DisorderLaw::gaussian(0.3, 2.0), -20, 20) >= 1 - 1e-6);
  // Cauchy tails: mass outside [-R, R] is 2/pi atan(1/R) ~ 6e-7 at R = 1e6.
  const auto c = DisorderLaw::cauchy(0.5, 1.0);
  const double mass = boost::math::quadrature::tanh_sinh<double>().integrate(
      [&](double w) { return c.density(w); }, -1e6, 1e6);
  CHECK(mass >= 1 - 1e-6);
}

TEST_CASE("absolute moments") {
  CHECK(DisorderLaw::uniform(0, 1).abs_moment(1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(DisorderLaw::cauchy(0, 1).abs_moment(1), UnsupportedError);
  CHECK(!DisorderLaw::cauchy(0, 1).has_finite_moment(1.0));
  CHECK(DisorderLaw::cauchy(0, 1).has_finite_moment(0.99));

  // Quadrature oracle: (1/pi) int |w|^{1/2} / (1 + w^2) dw = sqrt(2).
  const double q = 2.0 / pi *
                   boost::math::quadrature::tanh_sinh<double>().integrate(
                       [](double w) { return std::sqrt(w) / (1 + w * w); }, 0.0,
                       std::numeric_limits<double>::infinity());
  CHECK(q == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(DisorderLaw::cauchy(0, 1).abs_moment(0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  // Shifted laws go through quadrature; compare with an independent integration.
  for (auto law : {DisorderLaw::cauchy(0.7, 0.4), DisorderLaw::gaussian(1.2, 0.5)}) {
    for (double tau : {0.3, 0.5}) {
      const double ref = boost::math::quadrature::tanh_sinh<double>().integrate(
                             [&](double w) { return std::pow(std::abs(w), tau) * law.density(w); },
                             -std::numeric_limits<double>::infinity(), 0.0) +
                         boost::math::quadrature::tanh_sinh<double>().integrate(
                             [&](double w) { return std::pow(std::abs(w), tau) * law.density(w); },
                             0.0, std::numeric_limits<double>::infinity());
      CHECK(law.abs_moment(tau) == doctest::Approx(ref).epsilon(1e-8));
    }
  }
  {
    const auto u = DisorderLaw::uniform(-0.5, 2.0);
    const double tau = 0.3;
    auto f = [&](double w) { return std::pow(std::abs(w), tau) * u.density(w); };
    boost::math::quadrature::tanh_sinh<double> ts;
    CHECK(u.abs_moment(tau) == doctest::Approx(ts.integrate(f, -0.5, 0.0) + ts.integrate(f, 0.0, 2.0)).epsilon(1e-8));
  }
  CHECK(DisorderLaw::gaussian(0, 1).abs_moment(2) == doctest::Approx(1.0));
  CHECK(DisorderLaw::constant(-3).abs_moment(2) == doctest::Approx(9.0));
}

TEST_CASE("characteristic function modulus") {
  CHECK(DisorderLaw::cauchy(0, 1).char_modulus(1) == doctest::Approx(std::exp(-1.0)));
  CHECK(DisorderLaw::gaussian(0, 1).char_modulus(2) == doctest::Approx(std::exp(-2.0)));
  CHECK(DisorderLaw::uniform(-1, 1).char_modulus(pi) == doctest::Approx(0.0).epsilon(1e-15));
  for (auto law : {DisorderLaw::cauchy(1, 2), DisorderLaw::gaussian(-1, 3), DisorderLaw::uniform(0, 1)}) {
    CHECK(law.char_modulus(0) == doctest::Approx(1.0));
    for (double xi = -30; xi <= 30; xi += 0.173) CHECK(law.char_modulus(xi) <= 1.0 + 1e-15);
  }
  // Tail sup for uniform(-1,1) beyond the first zero is the second lobe max ~ 0.2172.
  CHECK(DisorderLaw::uniform(-1, 1).char_modulus_tail_sup(pi) == doctest::Approx(0.217234).epsilon(1e-5));
  CHECK(DisorderLaw::cauchy(0, 1).char_modulus_tail_sup(0.5) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("sampling") {
  Rng r(1);
  auto c = DisorderLaw::constant(3).sample(r, 4);
  CHECK(c == std::vector<double>{3, 3, 3, 3});

  Rng a(42), b(42);
  const auto law = DisorderLaw::cauchy(0, 1);
  CHECK(law.sample(a, 100) == law.sample(b, 100));

  Rng u(7);
  const auto xs = DisorderLaw::uniform(0, 1).sample(u, 100000);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("empirical CDF within DKW band") {
  // P(sup |F_n - F| > eps) <= 2 exp(-2 n eps^2); eps for 1e-6 failure probability.
  const std::size_t n = 100000;
  const double eps = std::sqrt(std::log(2.0 / 1e-6) / (2.0 * n));
  for (auto law : {DisorderLaw::cauchy(0.2, 1.5), DisorderLaw::gaussian(0, 2), DisorderLaw::uniform(-1, 3)}) {
    Rng r(123);
    auto xs = law.sample(r, n);
    std::sort(xs.begin(), xs.end());
    double d = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double F = law.cdf(xs[i]);
      d = std::max({d, std::abs(F - double(i) / n), std::abs(F - double(i + 1) / n)});
    }
    CHECK(d < eps);
  }
}

TEST_CASE("moment exponents and config factory") {
  CHECK(DisorderLaw::cauchy(0, 1).moment_exponent() == 0.5);
  CHECK(DisorderLaw::uniform(0, 1).moment_exponent() == 2.0);
  CHECK(DisorderLaw::from_spec("cauchy", 0, 1).family() == LawFamily::cauchy);
  CHECK(DisorderLaw::from_spec("constant", 2, 0).family() == LawFamily::constant);
  CHECK_THROWS_AS(DisorderLaw::from_spec("bernoulli", 0, 1), ParameterError);
}
