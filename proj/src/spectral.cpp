#include "canopy/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "canopy/error.hpp"
#include "canopy/kernels.hpp"

namespace canopy {

EigenSystem diagonalize(const DenseMatrix& m, bool keep_vectors) {
  EigenSystem out;
  out.n = m.n;
  out.values.resize(m.n);
  if (m.n == 0) return out;
  std::vector<double> a = m.data;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_ROW_MAJOR, keep_vectors ? 'V' : 'N', 'U', static_cast<lapack_int>(m.n),
                     a.data(), static_cast<lapack_int>(m.n), out.values.data());
  if (info != 0) throw ConvergenceError("dsyevd failed with info " + std::to_string(info));
  if (keep_vectors) out.vectors = std::move(a);
  return out;
}

EigenSystem diagonalize(const OperatorSample& op, bool keep_vectors, std::size_t dense_cap) {
  return diagonalize(to_dense(op, dense_cap), keep_vectors);
}

RescaledPointProcess rescaled_process(std::span<const double> eigenvalues, double E,
                                      std::size_t volume, double window) {
  if (!(window > 0.0)) throw ParameterError("rescaled_process: window must be > 0");
  RescaledPointProcess p{E, volume, window, {}};
  const double scale = static_cast<double>(volume);
  for (double e : eigenvalues) {
    const double x = scale * (e - E);
    if (std::abs(x) <= window) p.points.push_back(x);
  }
  std::sort(p.points.begin(), p.points.end());
  return p;
}

RescaledPointProcess rescaled_process(const EigenSystem& eig, double E, std::size_t volume,
                                      double window) {
  return rescaled_process(eig.values, E, volume, window);
}

double spectral_measure(const EigenSystem& eig, std::size_t x, double lo, double hi) {
  if (!eig.has_vectors()) throw ParameterError("spectral_measure needs eigenvectors");
  if (x >= eig.n) throw ParameterError("spectral_measure: vertex out of range");
  double sum = 0.0;
  for (std::size_t k = 0; k < eig.n; ++k)
    if (eig.values[k] >= lo && eig.values[k] <= hi) {
      const double c = eig.component(k, x);
      sum += c * c;
    }
  return sum;
}

namespace {

kernels::TreeView view_of(const OperatorSample& op) {
  return {op.tree_graph().child_offsets(), op.diagonal};
}

struct Bracket {
  double lo, hi;
  std::uint32_t count_lo, count_hi;
};

}  // namespace

std::size_t tree_count_below(const OperatorSample& op, double E) {
  std::vector<double> scratch(op.vertex_count());
  std::uint32_t count = 0;
  kernels::sturm_count(view_of(op), {&E, 1}, scratch, {&count, 1});
  return count;
}

std::vector<double> tree_eigenvalues_in(const OperatorSample& op, double lo, double hi, double tol) {
  if (!(hi > lo)) return {};
  if (tol <= 0.0) tol = 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)});
  const auto view = view_of(op);
  const std::size_t n = op.vertex_count();

  // Each pass splits every unresolved bracket into kParts pieces; all interior shifts
  // of the pass go through the kernel as one batch.
  constexpr int kParts = 5;
  std::vector<double> shifts{lo, hi};
  std::vector<std::uint32_t> counts(2);
  std::vector<double> scratch(2 * n);
  kernels::sturm_count(view, shifts, scratch, counts);

  std::vector<double> out;
  std::vector<Bracket> active;
  if (counts[1] > counts[0]) active.push_back({lo, hi, counts[0], counts[1]});
  while (!active.empty()) {
    std::vector<Bracket> pending;
    shifts.clear();
    for (const Bracket& br : active) {
      if (br.hi - br.lo <= tol) {
        out.insert(out.end(), br.count_hi - br.count_lo, 0.5 * (br.lo + br.hi));
        continue;
      }
      pending.push_back(br);
      for (int k = 1; k < kParts; ++k) shifts.push_back(br.lo + (br.hi - br.lo) * k / kParts);
    }
    if (pending.empty()) break;
    counts.assign(shifts.size(), 0);
    scratch.assign(shifts.size() * n, 0.0);
    kernels::sturm_count(view, shifts, scratch, counts);
    active.clear();
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const Bracket& br = pending[i];
      double a = br.lo;
      std::uint32_t ca = br.count_lo;
      for (int k = 0; k < kParts; ++k) {
        const bool last = k == kParts - 1;
        const double b = last ? br.hi : shifts[i * (kParts - 1) + k];
        // Counts are monotone in exact arithmetic; clamp rounding noise.
        std::uint32_t cb = last ? br.count_hi : shifts.empty() ? 0 : counts[i * (kParts - 1) + k];
        cb = std::clamp(cb, ca, br.count_hi);
        if (cb > ca) active.push_back({a, b, ca, cb});
        a = b;
        ca = cb;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RescaledPointProcess tree_rescaled_process(const OperatorSample& op, double E, std::size_t volume,
                                           double window) {
  if (!(window > 0.0)) throw ParameterError("rescaled_process: window must be > 0");
  const double half = window / static_cast<double>(volume);
  // Widen the search slightly; rescaled_process applies the exact window.
  const auto values = tree_eigenvalues_in(op, E - 1.001 * half, E + 1.001 * half);
  return rescaled_process(values, E, volume, window);
}

std::vector<double> root_spectral_weights(const OperatorSample& op,
                                          std::span<const double> eigenvalues) {
  const TreeGraph& g = op.tree_graph();
  const std::size_t n = g.vertex_count();
  std::vector<double> gamma(n), dgamma(n);
  std::vector<double> out;
  out.reserve(eigenvalues.size());
  for (double E : eigenvalues) {
    for (std::size_t i = n; i-- > 1;) {
      const Vertex v = static_cast<Vertex>(i);
      double sum = 0.0;
      double dsum = 0.0;
      for (Vertex c = g.child_begin(v); c < g.child_end(v); ++c) {
        sum += gamma[c];
        dsum += dgamma[c];
      }
      const double gv = 1.0 / (op.diagonal[v] - E - sum);
      gamma[v] = gv;
      dgamma[v] = gv * gv * (1.0 + dsum);
    }
    double dsum = 0.0;
    for (Vertex c = g.child_begin(0); c < g.child_end(0); ++c) dsum += dgamma[c];
    const double w = 1.0 / (1.0 + dsum);
    out.push_back(std::isfinite(w) ? w : 0.0);
  }
  return out;
}

std::vector<RescaledPointProcess> subtree_processes(const OperatorSample& op, int N, double E,
                                                    double window) {
  const TreeGraph& g = op.tree_graph();
  if (N < 0 || N > g.depth_parameter())
    throw ParameterError("subtree_processes: N must lie in [0, L]");
  std::vector<RescaledPointProcess> out;
  for (Vertex x : g.vertices_at_depth(N)) {
    const OperatorSample sub = N == 0 ? op : restrict_to_subtree(op, x);
    out.push_back(tree_rescaled_process(sub, E, op.vertex_count(), window));
  }
  return out;
}

std::vector<double> canopy_chain_spectrum(int K, double b, int n) {
  if (n < 1) throw ParameterError("canopy_chain_spectrum: n must be >= 1");
  if (K < 1) throw ParameterError("canopy_chain_spectrum: K must be >= 1");
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  std::vector<double> off(static_cast<std::size_t>(n > 1 ? n - 1 : 1), std::sqrt(static_cast<double>(K)));
  diag[0] = b;
  const lapack_int info =
      LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', n, diag.data(), off.data(), nullptr, 1);
  if (info != 0) throw ConvergenceError("dstev failed with info " + std::to_string(info));
  return diag;
}

std::vector<double> canopy_decomposition_spectrum(int K, double b, int L) {
  if (L < 0) throw ParameterError("canopy_decomposition_spectrum: L must be >= 0");
  if (K < 2) throw ParameterError("canopy_decomposition_spectrum: K must be >= 2");
  std::vector<double> out = canopy_chain_spectrum(K, b, L + 1);
  // K^{L-m} vertices sit at boundary distance m, each contributing K-1 chains of length m.
  std::size_t vertices_at_m = 1;
  for (int m = L; m >= 1; --m) {
    const auto chain = canopy_chain_spectrum(K, b, m);
    for (std::size_t copy = 0; copy < vertices_at_m * static_cast<std::size_t>(K - 1); ++copy)
      out.insert(out.end(), chain.begin(), chain.end());
    vertices_at_m *= static_cast<std::size_t>(K);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_eigenvalue_csv(std::ostream& out, std::size_t realization,
                          std::span<const double> values) {
  const auto old = out.precision(17);
  for (std::size_t k = 0; k < values.size(); ++k)
    out << realization << ',' << k << ',' << values[k] << '\n';
  out.precision(old);
}

}  // namespace canopy
