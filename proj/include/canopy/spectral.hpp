#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "canopy/operator.hpp"

namespace canopy {

/// Eigenvalues in ascending order, optionally with orthonormal eigenvectors.
struct EigenSystem {
  std::size_t n = 0;
  std::vector<double> values;
  /// Row-major n x n; column k is the eigenvector of values[k]. Empty if not kept.
  std::vector<double> vectors;

  bool has_vectors() const { return !vectors.empty(); }
  /// psi_k(x)
  double component(std::size_t k, std::size_t x) const { return vectors[x * n + k]; }
};

/// Eigenvalues |T|(E_n - E) within [-window, window], sorted.
struct RescaledPointProcess {
  double center = 0.0;
  std::size_t volume = 0;
  double window = 0.0;
  std::vector<double> points;
};

inline constexpr double kDefaultWindow = 20.0;

EigenSystem diagonalize(const OperatorSample& op, bool keep_vectors,
                        std::size_t dense_cap = kDefaultDenseCap);
EigenSystem diagonalize(const DenseMatrix& m, bool keep_vectors);

RescaledPointProcess rescaled_process(std::span<const double> eigenvalues, double E,
                                      std::size_t volume, double window = kDefaultWindow);
RescaledPointProcess rescaled_process(const EigenSystem& eig, double E, std::size_t volume,
                                      double window = kDefaultWindow);

/// sigma_x([lo, hi]) = sum over E_n in [lo, hi] of |psi_n(x)|^2.
double spectral_measure(const EigenSystem& eig, std::size_t x, double lo, double hi);

/// Number of eigenvalues of a tree operator strictly below E (Sturm inertia count).
std::size_t tree_count_below(const OperatorSample& op, double E);

/// All eigenvalues of a tree operator in [lo, hi), with multiplicity, by Sturm
/// multisection. Accuracy is `tol` in absolute terms (default ~1e-13 max(1,|E|)).
std::vector<double> tree_eigenvalues_in(const OperatorSample& op, double lo, double hi,
                                        double tol = 0.0);

/// Rescaled process of a tree operator computed with tree_eigenvalues_in.
RescaledPointProcess tree_rescaled_process(const OperatorSample& op, double E, std::size_t volume,
                                           double window = kDefaultWindow);

/// |psi_n(root)|^2 for simple eigenvalues E_n, from the residue of G(root,root) at
/// E_n: -1 / (d/dE 1/G)(E_n), evaluated with one O(N) derivative recursion each.
std::vector<double> root_spectral_weights(const OperatorSample& op,
                                          std::span<const double> eigenvalues);

/// Processes of the forward subtrees at depth N, each built from the same potential
/// realization and rescaled by the FULL volume of `op`.
std::vector<RescaledPointProcess> subtree_processes(const OperatorSample& op, int N, double E,
                                                    double window = kDefaultWindow);

/// Eigenvalues of the n x n Jacobi matrix with diagonal (b, 0, ..., 0) and
/// off-diagonal sqrt(K): the radial reduction of the canopy adjacency.
std::vector<double> canopy_chain_spectrum(int K, double b, int n);

/// Spectrum of A + B on T_L assembled from chain spectra: one chain of length L+1
/// plus (K-1) chains of length m for every vertex at boundary distance m >= 1.
std::vector<double> canopy_decomposition_spectrum(int K, double b, int L);

/// CSV rows `realization,n,energy`.
void write_eigenvalue_csv(std::ostream& out, std::size_t realization,
                          std::span<const double> values);

}  // namespace canopy
