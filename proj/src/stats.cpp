#include "canopy/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "canopy/error.hpp"

namespace canopy {

Estimate mean_stderr(std::span<const double> xs) {
  Estimate e;
  e.samples = xs.size();
  if (xs.empty()) return e;
  e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return e;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ParameterError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2)
    throw ParameterError("weighted_line_fit needs >= 2 matching points");
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(sigma[i] > 0.0)) throw ParameterError("weighted_line_fit: sigma must be > 0");
    const double w = 1.0 / (sigma[i] * sigma[i]);
    S += w;
    Sx += w * x[i];
    Sy += w * y[i];
    Sxx += w * x[i] * x[i];
    Sxy += w * x[i] * y[i];
  }
  const double det = S * Sxx - Sx * Sx;
  LineFit f;
  f.slope = (S * Sxy - Sx * Sy) / det;
  f.intercept = (Sxx * Sy - Sx * Sxy) / det;
  f.slope_stderr = std::sqrt(S / det);
  for (std::size_t i = 0; i < x.size(); ++i) f.residuals.push_back(y[i] - f.intercept - f.slope * x[i]);
  return f;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("spearman needs >= 2 pairs");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

MannWhitney mann_whitney_less(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("mann_whitney_less needs two non-empty samples");
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  const auto r = ranks(all);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  double r1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r1 += r[i];
  MannWhitney out;
  out.u = r1 - n1 * (n1 + 1) / 2;

  // Tie correction of the variance.
  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    ties += t * t * t - t;
    i = j + 1;
  }
  const double n = n1 + n2;
  const double var = n1 * n2 / 12.0 * ((n + 1) - ties / (n * (n - 1)));
  if (var <= 0.0) return out;
  // Continuity-corrected z for the lower tail.
  out.z = (out.u - n1 * n2 / 2 + 0.5) / std::sqrt(var);
  out.p_value = 0.5 * std::erfc(-out.z / std::sqrt(2.0));
  return out;
}

double poisson_pmf(std::size_t k, double mean) {
  if (mean < 0.0) throw ParameterError("poisson_pmf: mean must be >= 0");
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1));
}

}  // namespace canopy
