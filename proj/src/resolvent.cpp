#include "canopy/resolvent.hpp"

#include <cmath>
#include <string>

#include "canopy/error.hpp"
#include "canopy/kernels.hpp"

namespace canopy {

namespace {

kernels::TreeView view_of(const OperatorSample& op) {
  const TreeGraph& g = op.tree_graph();
  return {g.child_offsets(), op.diagonal};
}

[[noreturn]] void throw_singular(std::size_t vertex, cplx z) {
  throw SingularEnergyError(vertex, "singular pivot at vertex " + std::to_string(vertex) +
                                        " for z = (" + std::to_string(z.real()) + ", " +
                                        std::to_string(z.imag()) + ")");
}

cplx checked_inverse(cplx den, std::size_t vertex, cplx z) {
  if (std::abs(den.real()) < kernels::kSingularPivot && std::abs(den.imag()) < kernels::kSingularPivot)
    throw_singular(vertex, z);
  return 1.0 / den;
}

cplx child_sum(const TreeGraph& g, const GammaTable& t, Vertex v) {
  cplx acc = 0.0;
  for (Vertex c = g.child_begin(v); c < g.child_end(v); ++c) acc += t.gamma[c];
  return acc;
}

}  // namespace

GammaTable compute_gammas(const OperatorSample& op, cplx z) {
  const std::size_t n = op.vertex_count();
  const double zr = z.real();
  const double zi = z.imag();
  std::vector<double> re(n), im(n);
  const std::size_t bad = kernels::forward_green(view_of(op), {&zr, 1}, {&zi, 1}, re, im);
  if (bad != kernels::kNoSingularVertex) throw_singular(bad, z);
  GammaTable t{z, std::vector<cplx>(n)};
  for (std::size_t i = 0; i < n; ++i) t.gamma[i] = {re[i], im[i]};
  return t;
}

GammaBatch compute_gammas(const OperatorSample& op, std::span<const cplx> energies) {
  const std::size_t n = op.vertex_count();
  const std::size_t m = energies.size();
  std::vector<double> zr(m), zi(m);
  for (std::size_t j = 0; j < m; ++j) {
    zr[j] = energies[j].real();
    zi[j] = energies[j].imag();
  }
  GammaBatch out{m, std::vector<double>(n * m), std::vector<double>(n * m)};
  const std::size_t bad = kernels::forward_green(view_of(op), zr, zi, out.re, out.im);
  if (bad != kernels::kNoSingularVertex) throw_singular(bad, m ? energies[0] : cplx{});
  return out;
}

cplx green_root_to(const OperatorSample& op, const GammaTable& table, Vertex x) {
  const TreeGraph& g = op.tree_graph();
  if (x >= g.vertex_count()) throw ParameterError("green_root_to: vertex out of range");
  cplx prod = table.gamma[x];
  for (Vertex v = x; v != g.root(); v = g.parent(v)) prod *= -table.gamma[g.parent(v)];
  return prod;
}

std::vector<cplx> parent_side_energies(const OperatorSample& op, const GammaTable& table) {
  const TreeGraph& g = op.tree_graph();
  const std::size_t n = g.vertex_count();
  std::vector<cplx> s(n, 0.0);
  for (Vertex p = 0; p < n; ++p) {
    const Vertex cb = g.child_begin(p);
    const Vertex ce = g.child_end(p);
    for (Vertex c = cb; c < ce; ++c) {
      cplx siblings = 0.0;
      for (Vertex o = cb; o < ce; ++o)
        if (o != c) siblings += table.gamma[o];
      s[c] = checked_inverse(op.diagonal[p] - table.z - s[p] - siblings, p, table.z);
    }
  }
  return s;
}

std::vector<cplx> full_diagonal(const OperatorSample& op, cplx z) {
  const TreeGraph& g = op.tree_graph();
  const GammaTable t = compute_gammas(op, z);
  const auto s = parent_side_energies(op, t);
  std::vector<cplx> out(g.vertex_count());
  for (Vertex x = 0; x < g.vertex_count(); ++x)
    out[x] = checked_inverse(op.diagonal[x] - z - child_sum(g, t, x) - s[x], x, z);
  return out;
}

cplx green_pair(const OperatorSample& op, Vertex x, Vertex y, cplx z) {
  const TreeGraph& g = op.tree_graph();
  const auto path = path_between(g, x, y);
  const GammaTable t = compute_gammas(op, z);
  const auto s = parent_side_energies(op, t);
  cplx value = checked_inverse(op.diagonal[x] - z - child_sum(g, t, x) - s[x], x, z);
  for (std::size_t j = 1; j < path.size(); ++j) {
    const Vertex prev = path[j - 1];
    const Vertex next = path[j];
    // Upward steps leave the subtree of `prev`; downward steps enter that of `next`.
    value *= next == g.parent(prev) ? -s[prev] : -t.gamma[next];
  }
  return value;
}

cplx constant_potential_root_gamma(int K, double v, double b, cplx z, int depth) {
  if (K < 1 || depth < 0) throw ParameterError("constant_potential_root_gamma: need K >= 1, depth >= 0");
  cplx g = checked_inverse(v + b - z, 0, z);
  for (int m = 1; m <= depth; ++m) g = checked_inverse(v - z - static_cast<double>(K) * g, 0, z);
  return g;
}

cplx resolvent_trace(const OperatorSample& op, cplx z) {
  cplx sum = 0.0;
  for (const cplx& v : full_diagonal(op, z)) sum += v;
  return sum;
}

double column_norm_sq(const OperatorSample& op, Vertex x, cplx z) {
  if (!(z.imag() > 0.0)) throw ParameterError("column_norm_sq requires Im z > 0");
  if (x >= op.vertex_count()) throw ParameterError("column_norm_sq: vertex out of range");
  cplx gxx;
  if (x == op.tree_graph().root()) {
    gxx = compute_gammas(op, z).gamma[x];
  } else {
    gxx = full_diagonal(op, z)[x];
  }
  return gxx.imag() / z.imag();
}

}  // namespace canopy
