#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "canopy/disorder.hpp"
#include "canopy/graphs.hpp"

namespace canopy {

inline constexpr std::size_t kDefaultDenseCap = 8192;

/// Whether the boundary constant b is put on the diagonal of boundary vertices.
/// `automatic` applies it on regular, homogeneous and canopy trees and not on
/// decorated backbones or random regular graphs.
enum class BoundaryMode { automatic, on, off };

/// Row-major dense symmetric matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// One realization of H = A + V + B on a graph. Exactly one of `tree` and `simple`
/// is set. Immutable after creation.
struct OperatorSample {
  std::shared_ptr<const TreeGraph> tree;
  std::shared_ptr<const SimpleGraph> simple;
  std::vector<double> potential;
  /// omega_x + b [x is boundary and the boundary term applies]
  std::vector<double> diagonal;
  double b = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;

  std::size_t vertex_count() const { return diagonal.size(); }
  bool is_tree() const { return static_cast<bool>(tree); }
  const TreeGraph& tree_graph() const;
};

OperatorSample sample_operator(std::shared_ptr<const TreeGraph> graph, const DisorderLaw& law,
                               double b, std::uint64_t seed, std::uint64_t realization,
                               BoundaryMode mode = BoundaryMode::automatic);
OperatorSample sample_operator(std::shared_ptr<const SimpleGraph> graph, const DisorderLaw& law,
                               double b, std::uint64_t seed, std::uint64_t realization,
                               BoundaryMode mode = BoundaryMode::automatic);

/// Operator with an explicitly given potential (tests, oracles, restrictions).
OperatorSample make_operator(std::shared_ptr<const TreeGraph> graph, std::vector<double> potential,
                             double b, BoundaryMode mode = BoundaryMode::automatic);
OperatorSample make_operator(std::shared_ptr<const SimpleGraph> graph,
                             std::vector<double> potential, double b = 0.0,
                             BoundaryMode mode = BoundaryMode::automatic);

/// Restriction of a tree operator to the forward subtree of `x`, keeping the
/// potential and the boundary term of the full operator.
OperatorSample restrict_to_subtree(const OperatorSample& op, Vertex x);

DenseMatrix to_dense(const OperatorSample& op, std::size_t dense_cap = kDefaultDenseCap);

void apply(const OperatorSample& op, std::span<const double> v, std::span<double> out);
void apply(const OperatorSample& op, std::span<const std::complex<double>> v,
           std::span<std::complex<double>> out);
std::vector<double> apply(const OperatorSample& op, std::span<const double> v);

/// Coordinate-format dump: one `row col value` line per structurally non-zero entry.
void write_coordinate(const OperatorSample& op, std::ostream& out);

/// Number of edges of the underlying graph.
std::size_t edge_count(const OperatorSample& op);

}  // namespace canopy
