#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "canopy/ensemble.hpp"
#include "canopy/error.hpp"
#include "canopy/stats.hpp"

using namespace canopy;

TEST_CASE("mean and standard error") {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto e = mean_stderr(xs);
  CHECK(e.mean == 2.5);
  CHECK(e.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-15));
  CHECK(e.samples == 4);
  CHECK(mean_stderr(std::vector<double>{7.0}).stderr_ == 0.0);
}

TEST_CASE("quantiles interpolate linearly") {
  CHECK(quantile({4, 1, 3, 2}, 0.5) == 2.5);
  CHECK(quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(quantile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(median({5, 1, 3}) == 3.0);
  CHECK_THROWS_AS(quantile({}, 0.5), ParameterError);
}

TEST_CASE("weighted line fit") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(1.5 - 0.25 * v);
  const std::vector<double> sig(5, 1.0);
  const auto f = weighted_line_fit(x, y, sig);
  CHECK(f.slope == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.5).epsilon(1e-14));
  // Unit weights: stderr = 1 / sqrt(sum (x - xbar)^2) = 1 / sqrt(10).
  CHECK(f.slope_stderr == doctest::Approx(1 / std::sqrt(10.0)).epsilon(1e-14));
  for (double r : f.residuals) CHECK(std::abs(r) < 1e-14);

  // Doubling every sigma doubles the stderr.
  const std::vector<double> sig2(5, 2.0);
  CHECK(weighted_line_fit(x, y, sig2).slope_stderr == doctest::Approx(2 / std::sqrt(10.0)));
  CHECK_THROWS_AS(weighted_line_fit(std::vector<double>{1}, std::vector<double>{1}, std::vector<double>{1}),
                  ParameterError);
}

TEST_CASE("spearman with ties against scipy") {
  const std::vector<double> x{1, 2, 2, 3}, y{1, 3, 2, 4};
  CHECK(spearman(x, y) == doctest::Approx(0.9486832980505139).epsilon(1e-14));
  const std::vector<double> up{1, 2, 3, 4}, down{9, 7, 5, 1};
  CHECK(spearman(up, down) == doctest::Approx(-1.0));
}

TEST_CASE("mann whitney against scipy asymptotic test") {
  const std::vector<double> a{1.1, 2.3, 0.5, 3.3, 2.3, 0.7};
  const std::vector<double> b{2.0, 4.1, 3.3, 5.5, 2.3, 6.1, 3.9};
  const auto mw = mann_whitney_less(a, b);
  CHECK(mw.u == 5.5);
  CHECK(mw.p_value == doctest::Approx(0.015474494895004466).epsilon(1e-12));
  // Reversed alternative is not significant.
  CHECK(mann_whitney_less(b, a).p_value > 0.9);
}

TEST_CASE("poisson pmf") {
  double s = 0.0;
  for (std::size_t k = 0; k < 60; ++k) s += poisson_pmf(k, 3.7);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(poisson_pmf(2, 1.0) == doctest::Approx(std::exp(-1.0) / 2));
  CHECK(poisson_pmf(0, 0.0) == 1.0);
  CHECK(poisson_pmf(1, 0.0) == 0.0);
}

TEST_CASE("map_realizations is independent of thread count") {
  auto f = [](std::size_t r) {
    std::mt19937_64 g(r);
    return std::uniform_real_distribution<double>()(g);
  };
  const auto one = map_realizations(257, f, 1);
  const auto four = map_realizations(257, f, 4);
  CHECK(one == four);
  CHECK_THROWS_AS(map_realizations(10, [](std::size_t r) -> int {
                    if (r == 7) throw ParameterError("boom");
                    return 0;
                  }, 3),
                  ParameterError);
}
