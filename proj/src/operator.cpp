#include "canopy/operator.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

#include "canopy/error.hpp"

namespace canopy {

namespace {

bool boundary_applies(TreeKind kind, BoundaryMode mode) {
  switch (mode) {
    case BoundaryMode::on: return true;
    case BoundaryMode::off: return false;
    case BoundaryMode::automatic: return kind != TreeKind::decorated_backbone;
  }
  return false;
}

template <class T>
void apply_impl(const OperatorSample& op, std::span<const T> v, std::span<T> out) {
  const std::size_t n = op.vertex_count();
  if (v.size() != n || out.size() != n)
    throw ParameterError("apply: vector length " + std::to_string(v.size()) +
                         " does not match vertex count " + std::to_string(n));
  for (std::size_t x = 0; x < n; ++x) out[x] = op.diagonal[x] * v[x];
  if (op.tree) {
    const TreeGraph& g = *op.tree;
    for (Vertex x = 1; x < n; ++x) {
      const Vertex p = g.parent(x);
      out[x] += v[p];
      out[p] += v[x];
    }
  } else {
    for (std::size_t x = 0; x < n; ++x)
      for (Vertex y : op.simple->adjacency[x]) out[x] += v[y];
  }
}

}  // namespace

const TreeGraph& OperatorSample::tree_graph() const {
  if (!tree) throw ParameterError("operation requires a tree-structured operator");
  return *tree;
}

OperatorSample make_operator(std::shared_ptr<const TreeGraph> graph, std::vector<double> potential,
                             double b, BoundaryMode mode) {
  if (!graph) throw ParameterError("make_operator: null graph");
  if (potential.size() != graph->vertex_count())
    throw ParameterError("make_operator: potential length does not match vertex count");
  OperatorSample op;
  op.diagonal = potential;
  if (boundary_applies(graph->kind(), mode))
    for (Vertex x = 0; x < graph->vertex_count(); ++x)
      if (graph->is_boundary(x)) op.diagonal[x] += b;
  op.potential = std::move(potential);
  op.b = b;
  op.tree = std::move(graph);
  return op;
}

OperatorSample make_operator(std::shared_ptr<const SimpleGraph> graph,
                             std::vector<double> potential, double b, BoundaryMode mode) {
  if (!graph) throw ParameterError("make_operator: null graph");
  if (potential.size() != graph->vertex_count())
    throw ParameterError("make_operator: potential length does not match vertex count");
  if (mode == BoundaryMode::on)
    throw ParameterError("random regular graphs have no boundary vertices");
  OperatorSample op;
  op.diagonal = potential;
  op.potential = std::move(potential);
  op.b = b;
  op.simple = std::move(graph);
  return op;
}

OperatorSample sample_operator(std::shared_ptr<const TreeGraph> graph, const DisorderLaw& law,
                               double b, std::uint64_t seed, std::uint64_t realization,
                               BoundaryMode mode) {
  Rng rng(realization_seed(seed, realization));
  auto potential = law.sample(rng, graph->vertex_count());
  OperatorSample op = make_operator(std::move(graph), std::move(potential), b, mode);
  op.seed = seed;
  op.realization = realization;
  return op;
}

OperatorSample sample_operator(std::shared_ptr<const SimpleGraph> graph, const DisorderLaw& law,
                               double b, std::uint64_t seed, std::uint64_t realization,
                               BoundaryMode mode) {
  Rng rng(realization_seed(seed, realization));
  auto potential = law.sample(rng, graph->vertex_count());
  OperatorSample op = make_operator(std::move(graph), std::move(potential), b, mode);
  op.seed = seed;
  op.realization = realization;
  return op;
}

OperatorSample restrict_to_subtree(const OperatorSample& op, Vertex x) {
  const TreeGraph& g = op.tree_graph();
  const auto verts = g.forward_subtree(x);
  // Breadth-first order of the forward subtree is again a breadth-first numbering.
  std::vector<Vertex> local(g.vertex_count(), kNoParent);
  for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<Vertex>(i);
  std::vector<Vertex> parents(verts.size(), kNoParent);
  for (std::size_t i = 1; i < verts.size(); ++i) parents[i] = local[g.parent(verts[i])];
  const TreeKind kind = g.kind();
  auto sub = std::make_shared<const TreeGraph>(TreeGraph::from_parents(
      std::move(parents), g.branching(), g.depth_parameter() - g.depth(x), kind));
  OperatorSample out;
  out.tree = std::move(sub);
  out.b = op.b;
  out.seed = op.seed;
  out.realization = op.realization;
  out.potential.resize(verts.size());
  out.diagonal.resize(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    out.potential[i] = op.potential[verts[i]];
    out.diagonal[i] = op.diagonal[verts[i]];
  }
  return out;
}

DenseMatrix to_dense(const OperatorSample& op, std::size_t dense_cap) {
  const std::size_t n = op.vertex_count();
  if (n > dense_cap)
    throw SizeError("dense matrix of size " + std::to_string(n) + " exceeds the cap " +
                    std::to_string(dense_cap));
  DenseMatrix m{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t x = 0; x < n; ++x) m(x, x) = op.diagonal[x];
  if (op.tree) {
    for (Vertex x = 1; x < n; ++x) {
      const Vertex p = op.tree->parent(x);
      m(x, p) = 1.0;
      m(p, x) = 1.0;
    }
  } else {
    for (std::size_t x = 0; x < n; ++x)
      for (Vertex y : op.simple->adjacency[x]) m(x, y) = 1.0;
  }
  return m;
}

void apply(const OperatorSample& op, std::span<const double> v, std::span<double> out) {
  apply_impl<double>(op, v, out);
}

void apply(const OperatorSample& op, std::span<const std::complex<double>> v,
           std::span<std::complex<double>> out) {
  apply_impl<std::complex<double>>(op, v, out);
}

std::vector<double> apply(const OperatorSample& op, std::span<const double> v) {
  std::vector<double> out(op.vertex_count());
  apply(op, v, std::span<double>(out));
  return out;
}

std::size_t edge_count(const OperatorSample& op) {
  return op.tree ? op.tree->edge_count() : op.simple->edge_count();
}

void write_coordinate(const OperatorSample& op, std::ostream& out) {
  const auto old = out.precision(17);
  const std::size_t n = op.vertex_count();
  for (std::size_t x = 0; x < n; ++x) {
    out << x << ' ' << x << ' ' << op.diagonal[x] << '\n';
    if (op.tree) {
      const TreeGraph& g = *op.tree;
      if (x > 0) out << x << ' ' << g.parent(static_cast<Vertex>(x)) << " 1\n";
      for (Vertex c = g.child_begin(static_cast<Vertex>(x)); c < g.child_end(static_cast<Vertex>(x)); ++c)
        out << x << ' ' << c << " 1\n";
    } else {
      for (Vertex y : op.simple->adjacency[x]) out << x << ' ' << y << " 1\n";
    }
  }
  out.precision(old);
}

}  // namespace canopy
