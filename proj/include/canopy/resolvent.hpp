#pragma once

#include <complex>
#include <span>
#include <vector>

#include "canopy/operator.hpp"

namespace canopy {

using cplx = std::complex<double>;

/// Forward Green functions Gamma(x; z): the diagonal resolvent entry at x of the
/// operator restricted to the forward subtree of x.
struct GammaTable {
  cplx z;
  std::vector<cplx> gamma;
};

/// Forward Green functions for a batch of energies, vertex-major.
struct GammaBatch {
  std::size_t lanes = 0;
  std::vector<double> re;
  std::vector<double> im;

  cplx at(Vertex v, std::size_t lane) const { return {re[v * lanes + lane], im[v * lanes + lane]}; }
};

/// One leaf-to-root pass. Real z is accepted; a vanishing pivot raises
/// SingularEnergyError naming the vertex.
GammaTable compute_gammas(const OperatorSample& op, cplx z);
GammaBatch compute_gammas(const OperatorSample& op, std::span<const cplx> energies);

/// G(root, x; z) = (-1)^{dist} * product of Gamma over the root -> x path.
cplx green_root_to(const OperatorSample& op, const GammaTable& table, Vertex x);

/// Parent-side self-energies: S(x) is the diagonal Green function at parent(x) of the
/// tree with the forward subtree of x removed (S(root) = 0). Together with the
/// forward table this gives every diagonal and off-diagonal entry.
std::vector<cplx> parent_side_energies(const OperatorSample& op, const GammaTable& table);

/// G(x, x; z) for all x in O(N).
std::vector<cplx> full_diagonal(const OperatorSample& op, cplx z);

/// G(x, y; z) through the lowest common ancestor of x and y.
cplx green_pair(const OperatorSample& op, Vertex x, Vertex y, cplx z);

/// Gamma(root) of the regular K-ary tree of the given depth with constant potential v
/// and boundary constant b, via the radial recursion g_0 = 1/(v + b - z),
/// g_m = 1/(v - z - K g_{m-1}). Equals compute_gammas on the full tree; usable at
/// depths where the tree itself would not fit in memory.
cplx constant_potential_root_gamma(int K, double v, double b, cplx z, int depth);

/// Tr (H - z)^{-1}.
cplx resolvent_trace(const OperatorSample& op, cplx z);

/// ||(H - z)^{-1} delta_x||^2 = Im G(x,x;z) / Im z. Requires Im z > 0.
double column_norm_sq(const OperatorSample& op, Vertex x, cplx z);

}  // namespace canopy
