#include "canopy/graphs.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <set>
#include <string>
#include <utility>

#include "canopy/error.hpp"
#include "canopy/rng.hpp"

namespace canopy {

std::string_view to_string(TreeKind kind) {
  switch (kind) {
    case TreeKind::regular: return "regular";
    case TreeKind::homogeneous: return "homogeneous";
    case TreeKind::canopy_truncation: return "canopy_truncation";
    case TreeKind::decorated_backbone: return "decorated_backbone";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kMaxVertices = std::numeric_limits<Vertex>::max() - 1;

std::size_t checked_add(std::size_t a, std::size_t b) {
  if (a > kMaxVertices - b) throw SizeError("vertex count overflows the index type");
  return a + b;
}

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (b != 0 && a > kMaxVertices / b) throw SizeError("vertex count overflows the index type");
  return a * b;
}

void require_branching(int K) {
  if (K < 2) throw ParameterError("branching number K must be >= 2, got " + std::to_string(K));
}

void require_depth(int L, const char* name) {
  if (L < 0) throw ParameterError(std::string(name) + " must be >= 0, got " + std::to_string(L));
}

/// Breadth-first parent array for a tree whose vertices are generated in BFS order
/// with the given number of children each.
template <class ChildCount>
std::vector<Vertex> bfs_parents(std::size_t n, ChildCount&& child_count) {
  std::vector<Vertex> parents;
  parents.reserve(n);
  parents.push_back(kNoParent);
  for (std::size_t v = 0; v < parents.size(); ++v) {
    const std::size_t c = child_count(static_cast<Vertex>(v));
    for (std::size_t i = 0; i < c; ++i) parents.push_back(static_cast<Vertex>(v));
  }
  return parents;
}

}  // namespace

std::size_t regular_tree_size(int K, int L) {
  require_branching(K);
  require_depth(L, "depth L");
  std::size_t total = 0;
  std::size_t layer = 1;
  for (int d = 0; d <= L; ++d) {
    total = checked_add(total, layer);
    if (d < L) layer = checked_mul(layer, static_cast<std::size_t>(K));
  }
  return total;
}

TreeGraph TreeGraph::from_parents(std::vector<Vertex> parents, int branching,
                                  int depth_parameter, TreeKind kind) {
  const std::size_t n = parents.size();
  if (n == 0 || parents[0] != kNoParent) throw ParameterError("parent array must start at a root");
  TreeGraph g;
  g.branching_ = branching;
  g.depth_parameter_ = depth_parameter;
  g.kind_ = kind;

  std::vector<Vertex> counts(n + 1, 0);
  for (std::size_t v = 1; v < n; ++v) {
    if (parents[v] >= v || (v > 1 && parents[v] < parents[v - 1]))
      throw ParameterError("parent array is not in breadth-first order");
    ++counts[parents[v]];
  }
  g.child_offset_.assign(n + 1, 0);
  Vertex next = 1;
  for (std::size_t v = 0; v < n; ++v) {
    g.child_offset_[v] = next;
    next += counts[v];
  }
  g.child_offset_[n] = next;

  g.depth_.assign(n, 0);
  for (std::size_t v = 1; v < n; ++v) g.depth_[v] = g.depth_[parents[v]] + 1;

  g.boundary_distance_.assign(n, 0);
  g.is_boundary_.assign(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    const Vertex v = static_cast<Vertex>(i);
    if (g.child_offset_[v] == g.child_offset_[v + 1]) {
      g.is_boundary_[v] = 1;
      g.boundary_distance_[v] = 0;
    } else {
      int best = std::numeric_limits<int>::max();
      for (Vertex c = g.child_offset_[v]; c < g.child_offset_[v + 1]; ++c)
        best = std::min(best, g.boundary_distance_[c] + 1);
      g.boundary_distance_[v] = best;
    }
  }
  g.parent_ = std::move(parents);
  return g;
}

std::vector<Vertex> TreeGraph::vertices_at_depth(int d) const {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < vertex_count(); ++v)
    if (depth_[v] == d) out.push_back(v);
  return out;
}

std::vector<Vertex> TreeGraph::layer(int bd) const {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < vertex_count(); ++v)
    if (boundary_distance_[v] == bd) out.push_back(v);
  return out;
}

std::vector<Vertex> TreeGraph::forward_subtree(Vertex v) const {
  std::vector<Vertex> out{v};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (Vertex c = child_begin(out[i]); c < child_end(out[i]); ++c) out.push_back(c);
  return out;
}

std::vector<Vertex> TreeGraph::leftmost_ray() const {
  std::vector<Vertex> ray{root()};
  while (child_count(ray.back()) > 0) ray.push_back(child_begin(ray.back()));
  return ray;
}

TreeGraph build_regular_tree(int K, int L) {
  const std::size_t n = regular_tree_size(K, L);
  // Interior vertices are exactly the first (n-1)/K in BFS order.
  const std::size_t n_interior = (n - 1) / static_cast<std::size_t>(K);
  auto parents = bfs_parents(n, [&](Vertex v) {
    return v < n_interior ? static_cast<std::size_t>(K) : std::size_t{0};
  });
  return TreeGraph::from_parents(std::move(parents), K, L, TreeKind::regular);
}

TreeGraph build_homogeneous_tree(int K, int L) {
  require_branching(K);
  require_depth(L, "depth L");
  // 1 + (K+1) * (K^L - 1)/(K - 1)
  std::size_t n = 1;
  if (L >= 1) n = checked_add(1, checked_mul(static_cast<std::size_t>(K) + 1,
                                             regular_tree_size(K, L - 1)));
  std::vector<Vertex> parents;
  if (L == 0) {
    parents = {kNoParent};
  } else {
    const std::size_t n_interior =
        L == 1 ? 1 : 1 + (static_cast<std::size_t>(K) + 1) * regular_tree_size(K, L - 2);
    parents = bfs_parents(n, [&](Vertex v) -> std::size_t {
      if (v == 0) return static_cast<std::size_t>(K) + 1;
      return v < n_interior ? static_cast<std::size_t>(K) : 0;
    });
  }
  return TreeGraph::from_parents(std::move(parents), K, L, TreeKind::homogeneous);
}

TreeGraph build_canopy_truncation(int K, int D, double b) {
  TreeGraph g = build_regular_tree(K, D);
  g.kind_ = TreeKind::canopy_truncation;
  g.recorded_b_ = b;
  return g;
}

BackboneGraph build_decorated_backbone(int K, std::span<const int> depths) {
  require_branching(K);
  if (depths.empty()) throw ParameterError("decorated backbone needs at least one site");
  std::size_t total = depths.size();
  for (int L : depths) {
    require_depth(L, "decoration depth");
    total = checked_add(total, regular_tree_size(K, L));
  }

  // Node descriptors: backbone site n, or a vertex of the tree glued at site n with
  // `remaining` layers below it.
  struct Node {
    bool backbone;
    std::size_t site;
    int remaining;
  };
  std::vector<Node> nodes{{true, 0, 0}};
  std::vector<Vertex> parents{kNoParent};
  nodes.reserve(total);
  parents.reserve(total);
  BackboneGraph out;
  out.backbone.assign(depths.size(), 0);
  out.decoration_root.assign(depths.size(), 0);
  out.decoration_depth.assign(depths.begin(), depths.end());
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const Node node = nodes[v];
    if (node.backbone) {
      out.backbone[node.site] = static_cast<Vertex>(v);
      if (node.site + 1 < depths.size()) {
        nodes.push_back({true, node.site + 1, 0});
        parents.push_back(static_cast<Vertex>(v));
      }
      out.decoration_root[node.site] = static_cast<Vertex>(nodes.size());
      nodes.push_back({false, node.site, depths[node.site]});
      parents.push_back(static_cast<Vertex>(v));
    } else if (node.remaining > 0) {
      for (int i = 0; i < K; ++i) {
        nodes.push_back({false, node.site, node.remaining - 1});
        parents.push_back(static_cast<Vertex>(v));
      }
    }
  }
  int max_depth = 0;
  for (std::size_t n = 0; n < depths.size(); ++n)
    max_depth = std::max(max_depth, static_cast<int>(n) + 1 + depths[n]);
  out.tree = TreeGraph::from_parents(std::move(parents), K, max_depth,
                                     TreeKind::decorated_backbone);
  return out;
}

std::size_t SimpleGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nb : adjacency) twice += nb.size();
  return twice / 2;
}

namespace {

std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng.next();
  } while (x >= limit);
  return x % n;
}

bool is_connected(const std::vector<std::vector<Vertex>>& adj) {
  if (adj.empty()) return true;
  std::vector<char> seen(adj.size(), 0);
  std::deque<Vertex> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    for (Vertex w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        queue.push_back(w);
      }
  }
  return count == adj.size();
}

}  // namespace

SimpleGraph build_random_regular(int c, std::size_t N, std::uint64_t seed, int max_attempts) {
  if (c < 3) throw ParameterError("random regular degree c must be >= 3");
  if (N <= static_cast<std::size_t>(c)) throw ParameterError("random regular graph needs N > c");
  if ((static_cast<std::size_t>(c) * N) % 2 != 0)
    throw ParameterError("c*N must be even for a c-regular graph");
  if (N > kMaxVertices) throw SizeError("random regular graph too large");

  Rng rng(splitmix64(seed));
  std::vector<Vertex> stubs(static_cast<std::size_t>(c) * N);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<Vertex>(i / c);
    for (std::size_t i = stubs.size() - 1; i > 0; --i)
      std::swap(stubs[i], stubs[bounded(rng, i + 1)]);

    std::set<std::pair<Vertex, Vertex>> edges;
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
      Vertex a = stubs[i];
      Vertex b = stubs[i + 1];
      if (a == b) {
        ok = false;
        break;
      }
      if (a > b) std::swap(a, b);
      ok = edges.emplace(a, b).second;
    }
    if (!ok) continue;

    SimpleGraph g;
    g.degree = c;
    g.adjacency.assign(N, {});
    for (auto [a, b] : edges) {
      g.adjacency[a].push_back(b);
      g.adjacency[b].push_back(a);
    }
    g.connected = is_connected(g.adjacency);
    return g;
  }
  throw ConvergenceError("configuration model: rejection budget exhausted after " +
                         std::to_string(max_attempts) + " attempts");
}

std::vector<Vertex> path_between(const TreeGraph& g, Vertex x, Vertex y) {
  const std::size_t n = g.vertex_count();
  if (x >= n || y >= n) throw ParameterError("path_between: vertex index out of range");
  std::vector<Vertex> up;
  std::vector<Vertex> down;
  while (g.depth(x) > g.depth(y)) {
    up.push_back(x);
    x = g.parent(x);
  }
  while (g.depth(y) > g.depth(x)) {
    down.push_back(y);
    y = g.parent(y);
  }
  while (x != y) {
    up.push_back(x);
    down.push_back(y);
    x = g.parent(x);
    y = g.parent(y);
  }
  up.push_back(x);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

int tree_distance(const TreeGraph& g, Vertex x, Vertex y) {
  return static_cast<int>(path_between(g, x, y).size()) - 1;
}

void write_graph_dump(const TreeGraph& g, std::ostream& out) {
  out << g.branching() << ' ' << g.depth_parameter() << ' ' << to_string(g.kind()) << '\n';
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const long long p = g.parent(v) == kNoParent ? -1 : static_cast<long long>(g.parent(v));
    out << v << ' ' << p << ' ' << g.depth(v) << ' ' << g.boundary_distance(v) << ' '
        << (g.is_boundary(v) ? 1 : 0) << '\n';
  }
}

}  // namespace canopy
