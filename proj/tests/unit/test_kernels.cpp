#include <doctest.h>

#include <cstring>

#include "canopy/kernels.hpp"
#include "canopy/operator.hpp"
#include "oracles.hpp"

using namespace canopy;
namespace k = canopy::kernels;

namespace {

struct Case {
  OperatorSample op;
  k::TreeView view() const { return {op.tree_graph().child_offsets(), op.diagonal}; }
};

Case random_case(int K, int L, std::uint64_t seed) {
  return {sample_operator(oracle::tree(K, L), DisorderLaw::cauchy(0, 1), 0.4, seed, 0)};
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar forward recursion matches a direct evaluation") {
  auto c = random_case(2, 4, 3);
  const auto& g = c.op.tree_graph();
  const double zr = 0.2, zi = 0.05;
  std::vector<double> re(g.vertex_count()), im(g.vertex_count());
  CHECK(k::forward_green(k::Isa::scalar, c.view(), {&zr, 1}, {&zi, 1}, re, im) == k::kNoSingularVertex);
  std::vector<std::complex<double>> ref(g.vertex_count());
  for (std::size_t i = g.vertex_count(); i-- > 0;) {
    std::complex<double> acc = 0;
    for (Vertex ch = g.child_begin(Vertex(i)); ch < g.child_end(Vertex(i)); ++ch) acc += ref[ch];
    ref[i] = 1.0 / (c.op.diagonal[i] - std::complex<double>(zr, zi) - acc);
  }
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    CHECK(re[i] == doctest::Approx(ref[i].real()).epsilon(1e-13));
    CHECK(im[i] == doctest::Approx(ref[i].imag()).epsilon(1e-13));
  }
}

TEST_CASE("singular pivot is reported") {
  auto op = make_operator(oracle::tree(2, 0), {0.5}, 0.0);
  k::TreeView view{op.tree_graph().child_offsets(), op.diagonal};
  const double zr = 0.5, zi = 0.0;
  std::vector<double> re(1), im(1);
  for (auto isa : {k::Isa::scalar, k::detected_isa()})
    CHECK(k::forward_green(isa, view, {&zr, 1}, {&zi, 1}, re, im) == 0);
}

TEST_CASE("SIMD kernels agree bit for bit with the scalar reference") {
  if (k::detected_isa() == k::Isa::scalar) {
    MESSAGE("no SIMD variant on this machine; equivalence test skipped");
    return;
  }
  for (int lanes : {1, 3, 4, 7, 16}) {
    auto c = random_case(3, 5, 10 + lanes);
    const std::size_t n = c.op.vertex_count();
    std::vector<double> zr(lanes), zi(lanes), shifts(lanes);
    for (int j = 0; j < lanes; ++j) {
      zr[j] = -3.0 + 0.37 * j;
      zi[j] = j % 3 == 0 ? 0.0 : 1e-3 * j;
      shifts[j] = -4.0 + 0.53 * j;
    }
    std::vector<double> ar(n * lanes), ai(n * lanes), br(n * lanes), bi(n * lanes);
    const auto sa = k::forward_green(k::Isa::scalar, c.view(), zr, zi, ar, ai);
    const auto sb = k::forward_green(k::Isa::avx2, c.view(), zr, zi, br, bi);
    CHECK(sa == sb);
    CHECK(same_bits(ar, br));
    CHECK(same_bits(ai, bi));

    std::vector<double> s1(n * lanes), s2(n * lanes);
    std::vector<std::uint32_t> c1(lanes), c2(lanes);
    k::sturm_count(k::Isa::scalar, c.view(), shifts, s1, c1);
    k::sturm_count(k::Isa::avx2, c.view(), shifts, s2, c2);
    CHECK(c1 == c2);
    CHECK(same_bits(s1, s2));
  }
}

TEST_CASE("Sturm counts match dense eigenvalues") {
  auto c = random_case(2, 6, 77);
  const auto eig = diagonalize(c.op, false);
  std::vector<double> shifts;
  for (double s = -6; s <= 6; s += 0.25) shifts.push_back(s + 1e-7);
  std::vector<double> scratch(shifts.size() * c.op.vertex_count());
  for (auto isa : {k::Isa::scalar, k::detected_isa()}) {
    std::vector<std::uint32_t> counts(shifts.size());
    k::sturm_count(isa, c.view(), shifts, scratch, counts);
    for (std::size_t j = 0; j < shifts.size(); ++j) {
      const auto want = std::lower_bound(eig.values.begin(), eig.values.end(), shifts[j]) - eig.values.begin();
      CHECK(counts[j] == want);
    }
  }
}

TEST_CASE("dispatch override") {
  const auto before = k::active_isa();
  k::set_active_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  k::set_active_isa(before);
  CHECK(k::isa_name(k::Isa::avx2) == "avx2");
}
