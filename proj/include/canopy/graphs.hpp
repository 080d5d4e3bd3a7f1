#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace canopy {

using Vertex = std::uint32_t;
inline constexpr Vertex kNoParent = std::numeric_limits<Vertex>::max();

enum class TreeKind { regular, homogeneous, canopy_truncation, decorated_backbone };

std::string_view to_string(TreeKind kind);

/// Immutable rooted tree. Vertices are numbered breadth-first from the root with
/// children in creation order, so the children of every vertex form a contiguous
/// index range and every child has a larger index than its parent.
class TreeGraph {
 public:
  std::size_t vertex_count() const { return parent_.size(); }
  Vertex root() const { return 0; }
  Vertex parent(Vertex v) const { return parent_[v]; }

  /// Children of `v` are the vertices [child_begin(v), child_end(v)).
  Vertex child_begin(Vertex v) const { return child_offset_[v]; }
  Vertex child_end(Vertex v) const { return child_offset_[v + 1]; }
  std::size_t child_count(Vertex v) const { return child_offset_[v + 1] - child_offset_[v]; }

  int depth(Vertex v) const { return depth_[v]; }
  /// Distance from `v` to the nearest leaf of its forward subtree. For regular trees
  /// this is L - depth, i.e. the canopy layer index.
  int boundary_distance(Vertex v) const { return boundary_distance_[v]; }
  bool is_boundary(Vertex v) const { return is_boundary_[v] != 0; }

  /// Branching number K (forward degree of interior vertices of the regular parts).
  int branching() const { return branching_; }
  /// Depth parameter L (or D for canopy truncations); maximal depth for backbones.
  int depth_parameter() const { return depth_parameter_; }
  TreeKind kind() const { return kind_; }
  /// Boundary constant recorded by canopy truncations (0 otherwise).
  double recorded_boundary_constant() const { return recorded_b_; }

  std::span<const Vertex> parents() const { return parent_; }
  /// CSR offsets of size vertex_count()+1, consumed by the SIMD kernels.
  std::span<const Vertex> child_offsets() const { return child_offset_; }

  std::size_t edge_count() const { return vertex_count() == 0 ? 0 : vertex_count() - 1; }

  /// Vertices at a given depth (contiguous under breadth-first numbering).
  std::vector<Vertex> vertices_at_depth(int d) const;
  /// Vertices with a given boundary distance (canopy layer).
  std::vector<Vertex> layer(int boundary_distance) const;
  /// Breadth-first enumeration of the forward subtree of `v`, starting with `v`.
  std::vector<Vertex> forward_subtree(Vertex v) const;
  /// Root -> leaf path that always follows the first child.
  std::vector<Vertex> leftmost_ray() const;

  /// Builds a tree from a breadth-first parent array (parent[0] == kNoParent,
  /// parent[v] < v, parents non-decreasing). Boundary flags mark leaves.
  static TreeGraph from_parents(std::vector<Vertex> parents, int branching, int depth_parameter,
                                TreeKind kind);

 private:
  std::vector<Vertex> parent_;
  std::vector<Vertex> child_offset_;
  std::vector<int> depth_;
  std::vector<int> boundary_distance_;
  std::vector<std::uint8_t> is_boundary_;
  int branching_ = 2;
  int depth_parameter_ = 0;
  TreeKind kind_ = TreeKind::regular;
  double recorded_b_ = 0.0;

  friend TreeGraph build_canopy_truncation(int, int, double);
};

/// A tree containing a distinguished simple path (the backbone) whose removal leaves
/// finite regular trees. The underlying tree is rooted at backbone()[0].
struct BackboneGraph {
  TreeGraph tree;
  std::vector<Vertex> backbone;
  std::vector<int> decoration_depth;
  /// Root of the regular tree glued to backbone site n.
  std::vector<Vertex> decoration_root;
};

/// Simple undirected c-regular graph.
struct SimpleGraph {
  std::vector<std::vector<Vertex>> adjacency;
  int degree = 0;
  bool connected = false;

  std::size_t vertex_count() const { return adjacency.size(); }
  std::size_t edge_count() const;
};

/// Number of vertices of the regular rooted tree, (K^{L+1}-1)/(K-1). Throws SizeError
/// if it does not fit in a Vertex index.
std::size_t regular_tree_size(int K, int L);

TreeGraph build_regular_tree(int K, int L);
TreeGraph build_homogeneous_tree(int K, int L);
/// Depth-D piece of the canopy graph: the regular tree T_D read from its outer
/// boundary (layer 0) upward, with the boundary constant `b` recorded.
TreeGraph build_canopy_truncation(int K, int D, double b);
BackboneGraph build_decorated_backbone(int K, std::span<const int> depths);
/// Configuration-model pairing with rejection of loops and multi-edges.
SimpleGraph build_random_regular(int c, std::size_t N, std::uint64_t seed, int max_attempts = 1000);

/// The unique simple path x -> y through their lowest common ancestor.
std::vector<Vertex> path_between(const TreeGraph& g, Vertex x, Vertex y);
int tree_distance(const TreeGraph& g, Vertex x, Vertex y);

/// `K L kind` header followed by `index parent depth boundary_distance is_boundary`
/// per vertex (parent printed as -1 at the root).
void write_graph_dump(const TreeGraph& g, std::ostream& out);

}  // namespace canopy
