#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "canopy/disorder.hpp"
#include "canopy/spectral.hpp"
#include "canopy/stats.hpp"

namespace canopy {

enum class DosMethod { mc_canopy, finite_volume_histogram, exact_cauchy };

std::string_view to_string(DosMethod m);

struct DosEstimate {
  std::vector<double> energy;
  std::vector<double> density;
  std::vector<double> stderr_;
  double eta = 0.0;
  DosMethod method = DosMethod::mc_canopy;
  /// Bound on the omitted layers n > n_max (canopy estimators).
  double tail_bound = 0.0;
  /// pi^{-1} E[Im G(x_n, x_n)] per layer n (rows) and grid point (columns).
  std::vector<std::vector<double>> layer_density;
};

/// Histogram density |T|^{-1} E[#{E_n in bin}] / width on the given bin edges.
DosEstimate finite_volume_dos(std::span<const std::vector<double>> eigenvalues, std::size_t volume,
                              std::span<const double> bin_edges);
/// |T|^{-1} E[Tr F(H)] for a test function F.
Estimate finite_volume_dos(std::span<const std::vector<double>> eigenvalues, std::size_t volume,
                           const std::function<double(double)>& F);
/// |T|^{-1} E[Im Tr (H - z)^{-1}] over tree realizations, i.e. F = Im(. - z)^{-1}.
Estimate finite_volume_stieltjes(const DisorderLaw& law, int K, double b, int L, std::complex<double> z,
                                 std::size_t realizations, std::uint64_t seed);

/// T_{n,L}(F): the average of <delta_x, F(H) delta_x> over the layer at boundary
/// distance n, further averaged over the ensemble (vectors required).
double layer_dos(std::span<const EigenSystem> ensemble, const TreeGraph& g, int n,
                 const std::function<double(double)>& F);
/// Weight of layer n in the exact finite-volume decomposition,
/// |T|^{-1} Tr F = sum_n K^{L-n}/|T| T_{n,L}(F); tends to (K-1)/K K^{-n}.
double layer_weight(int K, int L, int n);
/// Asymptotic canopy weight (K-1)/K K^{-n}.
double canopy_weight(int K, int n);

struct CanopyDosParams {
  int K = 2;
  double b = 0.0;
  double eta = 1e-2;
  int depth = 12;   // D
  int n_max = 12;
};

/// Monte Carlo canopy dos on a depth-D canopy truncation: for each grid energy,
/// sum_{n<=n_max} (K-1)/K K^{-n} pi^{-1} E[Im G(x_n, x_n; E + i eta)].
DosEstimate canopy_dos_mc(const DisorderLaw& law, const CanopyDosParams& p, std::span<const double> grid,
                          std::size_t realizations, std::uint64_t seed);

/// Exact Cauchy-averaged canopy dos: the constant-potential operator (value c) at
/// z' = E + i(eta + gamma). With `depth` set the top vertex is free (matches
/// canopy_dos_mc); without it the infinite canopy is closed by fixed points to `tol`.
DosEstimate canopy_dos_exact_cauchy(int K, double c, double gamma, double b, std::span<const double> grid,
                                    double eta, std::optional<int> depth, int n_max, double tol = 1e-13);

/// Layer diagonal Green functions G_n = G(x_n, x_n; z') of the constant-potential
/// canopy truncation (or closed infinite canopy), n = 0..n_max.
std::vector<std::complex<double>> canopy_layer_green(int K, double c, double b, std::complex<double> z,
                                                     std::optional<int> depth, int n_max, double tol = 1e-13);

struct BetheAverage {
  double value = 0.0;
  /// (F_L - K F_{L-1}) / 2 for every consecutive pair.
  std::vector<double> sequence;
};
BetheAverage bethe_average(std::span<const double> F, int K);

void write_dos_csv(std::ostream& out, const DosEstimate& d, bool header = true);

}  // namespace canopy
