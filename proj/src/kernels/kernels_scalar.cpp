// Scalar reference kernels. Compiled without auto-vectorization or FP contraction.

#include <cmath>

#include "canopy/kernels.hpp"

namespace canopy::kernels::detail {

std::size_t forward_green_scalar(TreeView tree, std::span<const double> z_re,
                                 std::span<const double> z_im, std::span<double> g_re,
                                 std::span<double> g_im) {
  const std::size_t n = tree.vertex_count();
  const std::size_t m = z_re.size();
  std::size_t singular = kNoSingularVertex;
  for (std::size_t i = n; i-- > 0;) {
    const Vertex cb = tree.child_offsets[i];
    const Vertex ce = tree.child_offsets[i + 1];
    const double d = tree.diagonal[i];
    double* out_re = g_re.data() + i * m;
    double* out_im = g_im.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      double acc_re = 0.0;
      double acc_im = 0.0;
      for (Vertex c = cb; c < ce; ++c) {
        acc_re = acc_re + g_re[c * m + j];
        acc_im = acc_im + g_im[c * m + j];
      }
      const double a = (d - z_re[j]) - acc_re;
      const double b = (0.0 - z_im[j]) - acc_im;
      if (std::abs(a) < kSingularPivot && std::abs(b) < kSingularPivot && singular == kNoSingularVertex)
        singular = i;
      const double den = a * a + b * b;
      out_re[j] = a / den;
      out_im[j] = (0.0 - b) / den;
    }
    if (singular != kNoSingularVertex) return singular;
  }
  return singular;
}

void sturm_count_scalar(TreeView tree, std::span<const double> shifts, std::span<double> scratch,
                        std::span<std::uint32_t> counts) {
  const std::size_t n = tree.vertex_count();
  const std::size_t m = shifts.size();
  for (std::size_t j = 0; j < m; ++j) counts[j] = 0;
  for (std::size_t i = n; i-- > 0;) {
    const Vertex cb = tree.child_offsets[i];
    const Vertex ce = tree.child_offsets[i + 1];
    const double d = tree.diagonal[i];
    double* inv = scratch.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (Vertex c = cb; c < ce; ++c) acc = acc + scratch[c * m + j];
      double p = (d - shifts[j]) - acc;
      if (std::abs(p) < kSturmPivotFloor) p = -kSturmPivotFloor;
      counts[j] += p < 0.0 ? 1u : 0u;
      inv[j] = 1.0 / p;
    }
  }
}

}  // namespace canopy::kernels::detail
