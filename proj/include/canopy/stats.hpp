#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace canopy {

/// Monte Carlo mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

Estimate mean_stderr(std::span<const double> xs);
double median(std::vector<double> xs);
/// Linear-interpolation quantile, q in [0, 1].
double quantile(std::vector<double> xs, double q);

/// Weighted least-squares line y = a + b x with weights 1/sigma^2.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  std::vector<double> residuals;
};
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

/// One-sided Mann-Whitney U test of "a tends to be smaller than b"; normal
/// approximation with tie correction. Returns the p-value.
struct MannWhitney {
  double u = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};
MannWhitney mann_whitney_less(std::span<const double> a, std::span<const double> b);

double poisson_pmf(std::size_t k, double mean);

}  // namespace canopy
