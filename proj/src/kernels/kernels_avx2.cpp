// AVX2 kernels: four lanes (energies / shifts) per register. Tails fall back to the
// same scalar expressions so results match the reference exactly.

#include <immintrin.h>

#include <cmath>
#include <vector>

#include "canopy/kernels.hpp"

namespace canopy::kernels::detail {

namespace {

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

}  // namespace

std::size_t forward_green_avx2(TreeView tree, std::span<const double> z_re,
                               std::span<const double> z_im, std::span<double> g_re,
                               std::span<double> g_im) {
  const std::size_t n = tree.vertex_count();
  const std::size_t m = z_re.size();
  const std::size_t mv = m - m % 4;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d thr = _mm256_set1_pd(kSingularPivot);
  std::size_t singular = kNoSingularVertex;
  for (std::size_t i = n; i-- > 0;) {
    const Vertex cb = tree.child_offsets[i];
    const Vertex ce = tree.child_offsets[i + 1];
    const __m256d d = _mm256_set1_pd(tree.diagonal[i]);
    double* out_re = g_re.data() + i * m;
    double* out_im = g_im.data() + i * m;
    int bad = 0;
    std::size_t j = 0;
    for (; j < mv; j += 4) {
      __m256d acc_re = zero;
      __m256d acc_im = zero;
      for (Vertex c = cb; c < ce; ++c) {
        acc_re = _mm256_add_pd(acc_re, _mm256_loadu_pd(g_re.data() + c * m + j));
        acc_im = _mm256_add_pd(acc_im, _mm256_loadu_pd(g_im.data() + c * m + j));
      }
      const __m256d a = _mm256_sub_pd(_mm256_sub_pd(d, _mm256_loadu_pd(z_re.data() + j)), acc_re);
      const __m256d b = _mm256_sub_pd(_mm256_sub_pd(zero, _mm256_loadu_pd(z_im.data() + j)), acc_im);
      const __m256d small = _mm256_and_pd(_mm256_cmp_pd(abs_pd(a), thr, _CMP_LT_OQ),
                                          _mm256_cmp_pd(abs_pd(b), thr, _CMP_LT_OQ));
      bad |= _mm256_movemask_pd(small);
      const __m256d den = _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
      _mm256_storeu_pd(out_re + j, _mm256_div_pd(a, den));
      _mm256_storeu_pd(out_im + j, _mm256_div_pd(_mm256_sub_pd(zero, b), den));
    }
    for (; j < m; ++j) {
      double acc_re = 0.0;
      double acc_im = 0.0;
      for (Vertex c = cb; c < ce; ++c) {
        acc_re = acc_re + g_re[c * m + j];
        acc_im = acc_im + g_im[c * m + j];
      }
      const double a = (tree.diagonal[i] - z_re[j]) - acc_re;
      const double b = (0.0 - z_im[j]) - acc_im;
      if (std::abs(a) < kSingularPivot && std::abs(b) < kSingularPivot) bad = 1;
      const double den = a * a + b * b;
      out_re[j] = a / den;
      out_im[j] = (0.0 - b) / den;
    }
    if (bad) {
      singular = i;
      return singular;
    }
  }
  return singular;
}

void sturm_count_avx2(TreeView tree, std::span<const double> shifts, std::span<double> scratch,
                      std::span<std::uint32_t> counts) {
  const std::size_t n = tree.vertex_count();
  const std::size_t m = shifts.size();
  const std::size_t mv = m - m % 4;
  std::vector<double> tally(m, 0.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d floor_v = _mm256_set1_pd(kSturmPivotFloor);
  const __m256d neg_floor = _mm256_set1_pd(-kSturmPivotFloor);
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t i = n; i-- > 0;) {
    const Vertex cb = tree.child_offsets[i];
    const Vertex ce = tree.child_offsets[i + 1];
    const __m256d d = _mm256_set1_pd(tree.diagonal[i]);
    double* inv = scratch.data() + i * m;
    std::size_t j = 0;
    for (; j < mv; j += 4) {
      __m256d acc = zero;
      for (Vertex c = cb; c < ce; ++c)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(scratch.data() + c * m + j));
      __m256d p = _mm256_sub_pd(_mm256_sub_pd(d, _mm256_loadu_pd(shifts.data() + j)), acc);
      const __m256d tiny = _mm256_cmp_pd(abs_pd(p), floor_v, _CMP_LT_OQ);
      p = _mm256_blendv_pd(p, neg_floor, tiny);
      const __m256d neg = _mm256_cmp_pd(p, zero, _CMP_LT_OQ);
      _mm256_storeu_pd(tally.data() + j,
                       _mm256_add_pd(_mm256_loadu_pd(tally.data() + j), _mm256_and_pd(neg, one)));
      _mm256_storeu_pd(inv + j, _mm256_div_pd(one, p));
    }
    for (; j < m; ++j) {
      double acc = 0.0;
      for (Vertex c = cb; c < ce; ++c) acc = acc + scratch[c * m + j];
      double p = (tree.diagonal[i] - shifts[j]) - acc;
      if (std::abs(p) < kSturmPivotFloor) p = -kSturmPivotFloor;
      tally[j] += p < 0.0 ? 1.0 : 0.0;
      inv[j] = 1.0 / p;
    }
  }
  for (std::size_t j = 0; j < m; ++j) counts[j] = static_cast<std::uint32_t>(tally[j]);
}

}  // namespace canopy::kernels::detail
