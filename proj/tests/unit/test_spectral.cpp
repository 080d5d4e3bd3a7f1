#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "canopy/error.hpp"
#include "canopy/resolvent.hpp"
#include "canopy/spectral.hpp"
#include "oracles.hpp"

using namespace canopy;

namespace {

void check_multiset(std::vector<double> a, std::vector<double> b, double tol) {
  REQUIRE(a.size() == b.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < tol);
}

}  // namespace

TEST_CASE("small closed-form spectra") {
  auto one = make_operator(oracle::tree(2, 0), {5.0}, 0.0);
  CHECK(diagonalize(one, false).values == std::vector<double>{5.0});
  auto t2 = sample_operator(oracle::tree(2, 2), DisorderLaw::constant(0), 0.0, 1, 0);
  const double r = std::sqrt(2.0);
  check_multiset(diagonalize(t2, false).values, {-2, -r, 0, 0, 0, r, 2}, 1e-12);
}

TEST_CASE("eigensystem residuals, orthonormality and trace of H^2") {
  auto op = sample_operator(oracle::tree(3, 3), DisorderLaw::uniform(-1, 1), 0.5, 6, 0);
  const auto eig = diagonalize(op, true);
  const std::size_t n = eig.n;
  std::vector<double> psi(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t x = 0; x < n; ++x) psi[x] = eig.component(k, x);
    const auto hp = canopy::apply(op, psi);
    double res = 0;
    for (std::size_t x = 0; x < n; ++x) res += std::pow(hp[x] - eig.values[k] * psi[x], 2);
    CHECK(std::sqrt(res) <= 1e-8 * (1 + std::abs(eig.values[k])));
  }
  for (std::size_t a = 0; a < n; a += 5)
    for (std::size_t b = 0; b < n; b += 3) {
      double dot = 0;
      for (std::size_t x = 0; x < n; ++x) dot += eig.component(a, x) * eig.component(b, x);
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
  double sum_sq = 0, tr = 0;
  for (double e : eig.values) sum_sq += e * e;
  for (double d : op.diagonal) tr += d * d;
  tr += 2.0 * edge_count(op);
  CHECK(std::abs(sum_sq - tr) <= 1e-10 * tr);
  for (std::size_t k = 1; k < n; ++k) CHECK(eig.values[k] > eig.values[k - 1]);
}

TEST_CASE("rescaled process") {
  const double E = 0.3;
  const std::vector<double> exact{E};
  CHECK(rescaled_process(exact, E, 100, 3).points == std::vector<double>{0.0});
  const std::vector<double> two{E + 1.0 / 64, E + 2.0 / 64};
  auto p = rescaled_process(two, E, 64, 3);
  REQUIRE(p.points.size() == 2);
  CHECK(p.points[0] == doctest::Approx(1));
  CHECK(p.points[1] == doctest::Approx(2));
  const std::vector<double> far{E + 1};
  CHECK(rescaled_process(far, E, 1000, 20).points.empty());
  CHECK_THROWS_AS(rescaled_process(far, E, 10, 0.0), ParameterError);
}

TEST_CASE("spectral measure normalization and additivity") {
  auto one = make_operator(oracle::tree(2, 0), {1.0}, 0.0);
  CHECK(spectral_measure(diagonalize(one, true), 0, 0.5, 1.5) == doctest::Approx(1.0));

  auto op = sample_operator(oracle::tree(2, 3), DisorderLaw::uniform(0, 1), 0.0, 4, 0);
  const auto eig = diagonalize(op, true);
  for (std::size_t x = 0; x < eig.n; ++x) {
    CHECK(std::abs(spectral_measure(eig, x, -INFINITY, INFINITY) - 1.0) < 1e-10);
    double total = spectral_measure(eig, x, -INFINITY, -3.0);
    for (int i = 0; i < 8; ++i) total += spectral_measure(eig, x, -3.0 + 0.75 * i + 1e-300, -3.0 + 0.75 * (i + 1));
    total += spectral_measure(eig, x, 3.0 + 1e-15, INFINITY);
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
  CHECK_THROWS(spectral_measure(diagonalize(op, false), 0, 0, 1));
}

TEST_CASE("Sturm multisection reproduces dense eigenvalues") {
  for (std::uint64_t r = 0; r < 3; ++r) {
    auto op = sample_operator(oracle::tree(2, 7), DisorderLaw::cauchy(0, 1), 0.0, 12, r);
    const auto eig = diagonalize(op, false);
    for (auto [lo, hi] : {std::pair{-0.5, 0.5}, std::pair{-1e9, 1e9}, std::pair{0.9, 1.1}}) {
      std::vector<double> want;
      for (double e : eig.values)
        if (e >= lo && e < hi) want.push_back(e);
      check_multiset(tree_eigenvalues_in(op, lo, hi), want, 1e-9 * std::max(1.0, std::abs(lo)));
    }
    CHECK(tree_count_below(op, 0.0) ==
          std::size_t(std::lower_bound(eig.values.begin(), eig.values.end(), 0.0) - eig.values.begin()));
  }
  // Massive degeneracy of the free tree is resolved with multiplicity.
  auto free = sample_operator(oracle::tree(2, 6), DisorderLaw::constant(0), 0.0, 1, 0);
  check_multiset(tree_eigenvalues_in(free, -10, 10), diagonalize(free, false).values, 1e-10);
}

TEST_CASE("tree rescaled process matches the dense one") {
  auto op = sample_operator(oracle::tree(2, 8), DisorderLaw::cauchy(0, 1), 0.0, 3, 1);
  const auto eig = diagonalize(op, false);
  const auto a = rescaled_process(eig, 0.0, op.vertex_count(), 20);
  const auto b = tree_rescaled_process(op, 0.0, op.vertex_count(), 20);
  check_multiset(a.points, b.points, 1e-7);
}

TEST_CASE("root weights from residues match eigenvectors") {
  auto op = sample_operator(oracle::tree(2, 6), DisorderLaw::cauchy(0, 1), 0.0, 5, 0);
  const auto eig = diagonalize(op, true);
  const auto w = root_spectral_weights(op, eig.values);
  for (std::size_t k = 0; k < eig.n; ++k) {
    const double ref = eig.component(k, 0) * eig.component(k, 0);
    CHECK(std::abs(w[k] - ref) < 1e-8);
  }
}

TEST_CASE("subtree processes") {
  auto op = sample_operator(oracle::tree(2, 5), DisorderLaw::uniform(-1, 1), 0.0, 7, 0);
  const std::size_t vol = op.vertex_count();
  auto p0 = subtree_processes(op, 0, 0.1, 20);
  REQUIRE(p0.size() == 1);
  const auto full = rescaled_process(diagonalize(op, false), 0.1, vol, 20);
  check_multiset(p0[0].points, full.points, 1e-8);

  auto leaves = subtree_processes(op, 5, 0.0, 1e6);
  CHECK(leaves.size() == 32);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    CHECK(leaves[i].volume == vol);
    CHECK(leaves[i].points.size() <= 1);
  }
  const auto ids = op.tree_graph().vertices_at_depth(5);
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!leaves[i].points.empty()) CHECK(leaves[i].points[0] == doctest::Approx(vol * op.diagonal[ids[i]]));
  CHECK_THROWS_AS(subtree_processes(op, 6, 0.0), ParameterError);
}

TEST_CASE("canopy chains") {
  CHECK(canopy_chain_spectrum(2, 0.7, 1) == std::vector<double>{0.7});
  check_multiset(canopy_chain_spectrum(2, 0, 2), {-std::sqrt(2.0), std::sqrt(2.0)}, 1e-14);
  check_multiset(canopy_chain_spectrum(2, 0, 3), {-2, 0, 2}, 1e-14);
  CHECK(canopy_decomposition_spectrum(2, 0.3, 0) == std::vector<double>{0.3});
  check_multiset(canopy_decomposition_spectrum(2, 0, 1), {-std::sqrt(2.0), 0, std::sqrt(2.0)}, 1e-14);
  for (int K : {2, 3})
    for (int L = 0; L <= 4; ++L)
      for (double b : {0.0, 0.5, -1.0}) {
        auto op = sample_operator(oracle::tree(K, L), DisorderLaw::constant(0), b, 1, 0);
        check_multiset(canopy_decomposition_spectrum(K, b, L), diagonalize(op, false).values, 1e-9);
      }
}

TEST_CASE("eigenvalue csv") {
  std::ostringstream out;
  const std::vector<double> v{1.5, 2.0};
  write_eigenvalue_csv(out, 3, v);
  CHECK(out.str() == "3,0,1.5\n3,1,2\n");
}
