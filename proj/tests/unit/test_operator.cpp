#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "canopy/error.hpp"
#include "canopy/operator.hpp"
#include "canopy/spectral.hpp"
#include "oracles.hpp"

using namespace canopy;

TEST_CASE("zero potential gives the adjacency matrix") {
  auto g = oracle::tree(2, 2);
  auto op = sample_operator(g, DisorderLaw::constant(0), 0.0, 1, 0);
  auto m = to_dense(op);
  for (std::size_t x = 0; x < m.n; ++x)
    for (std::size_t y = 0; y < m.n; ++y) {
      const bool adj = (y > 0 && g->parent(Vertex(y)) == x) || (x > 0 && g->parent(Vertex(x)) == y);
      CHECK(m(x, y) == (adj ? 1.0 : 0.0));
    }
}

TEST_CASE("single vertex tree carries the boundary term") {
  auto op = sample_operator(oracle::tree(2, 0), DisorderLaw::constant(2), 1.5, 1, 0);
  auto m = to_dense(op);
  REQUIRE(m.n == 1);
  CHECK(m(0, 0) == 3.5);
}

TEST_CASE("sampling is deterministic per (seed, realization)") {
  auto g = oracle::tree(2, 4);
  const auto law = DisorderLaw::cauchy(0, 1);
  auto a = sample_operator(g, law, 0.3, 99, 5);
  auto b = sample_operator(g, law, 0.3, 99, 5);
  auto c = sample_operator(g, law, 0.3, 99, 6);
  CHECK(a.potential == b.potential);
  CHECK(a.potential != c.potential);
  CHECK(a.potential.size() == g->vertex_count());
}

TEST_CASE("star spectrum and boundary placement") {
  auto op = sample_operator(oracle::tree(2, 1), DisorderLaw::constant(0), 0.0, 1, 0);
  auto eig = diagonalize(op, false);
  CHECK(eig.values[0] == doctest::Approx(-std::sqrt(2.0)));
  CHECK(eig.values[1] == doctest::Approx(0.0));
  CHECK(eig.values[2] == doctest::Approx(std::sqrt(2.0)));

  auto g = oracle::tree(2, 2);
  auto t2 = sample_operator(g, DisorderLaw::constant(0), 0.75, 1, 0);
  auto m = to_dense(t2);
  for (Vertex v = 0; v < g->vertex_count(); ++v) CHECK(m(v, v) == (g->depth(v) == 2 ? 0.75 : 0.0));

  // Backbone: boundary term off by default.
  const std::vector<int> d{0};
  auto bb = std::make_shared<const TreeGraph>(build_decorated_backbone(2, d).tree);
  auto p = make_operator(bb, {0.4, -1.1}, 5.0);
  auto pm = to_dense(p);
  CHECK(pm(0, 0) == 0.4);
  CHECK(pm(1, 1) == -1.1);
  CHECK(pm(0, 1) == 1.0);
  CHECK(pm(1, 0) == 1.0);
}

TEST_CASE("dense cap") {
  auto op = sample_operator(oracle::tree(2, 6), DisorderLaw::constant(0), 0.0, 1, 0);
  CHECK_THROWS_AS(to_dense(op, 100), SizeError);
}

TEST_CASE("apply agrees with the dense matrix") {
  auto g = oracle::tree(3, 4);
  auto op = sample_operator(g, DisorderLaw::uniform(-1, 1), 0.5, 3, 1);
  auto m = to_dense(op);
  REQUIRE(m.n == g->vertex_count());
  for (std::size_t x = 0; x < m.n; ++x)
    for (std::size_t y = 0; y < m.n; ++y) CHECK(m(x, y) == m(y, x));

  std::vector<double> v(m.n);
  Rng rng(5);
  for (auto& e : v) e = rng.uniform_open() - 0.5;
  auto hv = canopy::apply(op, v);
  for (std::size_t x = 0; x < m.n; ++x) {
    double ref = 0;
    for (std::size_t y = 0; y < m.n; ++y) ref += m(x, y) * v[y];
    CHECK(std::abs(hv[x] - ref) < 1e-12);
  }

  auto star = sample_operator(oracle::tree(2, 1), DisorderLaw::constant(0), 0.0, 1, 0);
  CHECK(canopy::apply(star, std::vector<double>{1, 0, 0}) == std::vector<double>{0, 1, 1});
  CHECK(canopy::apply(op, std::vector<double>(m.n, 0.0)) == std::vector<double>(m.n, 0.0));
  CHECK_THROWS(canopy::apply(op, std::vector<double>(3, 0.0)));

  std::vector<std::complex<double>> cv(m.n), out(m.n);
  for (std::size_t i = 0; i < m.n; ++i) cv[i] = {v[i], -v[i]};
  canopy::apply(op, cv, out);
  for (std::size_t x = 0; x < m.n; ++x) CHECK(std::abs(out[x] - std::complex<double>(hv[x], -hv[x])) < 1e-12);
}

TEST_CASE("random regular operator and Gershgorin containment") {
  auto g = std::make_shared<const SimpleGraph>(build_random_regular(3, 50, 4));
  const auto law = DisorderLaw::uniform(-2, 2);
  auto op = sample_operator(g, law, 0.0, 8, 0);
  auto eig = diagonalize(op, false);
  const auto [lo, hi] = std::minmax_element(op.potential.begin(), op.potential.end());
  CHECK(eig.values.front() >= *lo - 3 - 1e-12);
  CHECK(eig.values.back() <= *hi + 3 + 1e-12);
  CHECK(edge_count(op) == 75);
}

TEST_CASE("subtree restriction keeps potential and boundary") {
  auto g = oracle::tree(2, 3);
  auto op = sample_operator(g, DisorderLaw::uniform(0, 1), 0.3, 2, 0);
  auto sub = restrict_to_subtree(op, 2);
  const auto verts = g->forward_subtree(2);
  REQUIRE(sub.vertex_count() == verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) CHECK(sub.diagonal[i] == op.diagonal[verts[i]]);
  CHECK(sub.tree_graph().depth_parameter() == 2);
}

TEST_CASE("coordinate dump lists diagonal and edges") {
  auto op = make_operator(oracle::tree(2, 1), {1.0, 0.0, 2.0}, 0.0);
  std::ostringstream out;
  write_coordinate(op, out);
  std::istringstream in(out.str());
  int count = 0;
  std::size_t r, c;
  double v;
  while (in >> r >> c >> v) ++count;
  CHECK(count == 3 + 4);
}
