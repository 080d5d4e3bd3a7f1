#include <atomic>
#include <cstdlib>
#include <string>

#include "canopy/error.hpp"
#include "canopy/kernels.hpp"

namespace canopy::kernels {

namespace {

Isa initial_isa() {
  const Isa best = detected_isa();
  if (const char* env = std::getenv("CANOPY_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && best == Isa::avx2) return Isa::avx2;
  }
  return best;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void check_shapes(TreeView tree, std::size_t lanes, std::size_t a, std::size_t b) {
  const std::size_t need = tree.vertex_count() * lanes;
  if (tree.child_offsets.size() != tree.vertex_count() + 1 || a < need || b < need)
    throw ParameterError("kernel buffer sizes do not match the tree");
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
#if defined(CANOPY_HAVE_AVX2)
  static const bool has_avx2 = __builtin_cpu_supports("avx2");
  if (has_avx2) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2)
    throw UnsupportedError("AVX2 kernels are not available on this CPU/build");
  active().store(isa, std::memory_order_relaxed);
}

std::size_t forward_green(Isa isa, TreeView tree, std::span<const double> z_re,
                          std::span<const double> z_im, std::span<double> g_re,
                          std::span<double> g_im) {
  if (z_re.size() != z_im.size()) throw ParameterError("forward_green: energy arrays differ");
  check_shapes(tree, z_re.size(), g_re.size(), g_im.size());
#if defined(CANOPY_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::forward_green_avx2(tree, z_re, z_im, g_re, g_im);
#endif
  (void)isa;
  return detail::forward_green_scalar(tree, z_re, z_im, g_re, g_im);
}

std::size_t forward_green(TreeView tree, std::span<const double> z_re, std::span<const double> z_im,
                          std::span<double> g_re, std::span<double> g_im) {
  return forward_green(active_isa(), tree, z_re, z_im, g_re, g_im);
}

void sturm_count(Isa isa, TreeView tree, std::span<const double> shifts, std::span<double> scratch,
                 std::span<std::uint32_t> counts) {
  check_shapes(tree, shifts.size(), scratch.size(), scratch.size());
  if (counts.size() < shifts.size()) throw ParameterError("sturm_count: counts too short");
#if defined(CANOPY_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::sturm_count_avx2(tree, shifts, scratch, counts);
#endif
  (void)isa;
  detail::sturm_count_scalar(tree, shifts, scratch, counts);
}

void sturm_count(TreeView tree, std::span<const double> shifts, std::span<double> scratch,
                 std::span<std::uint32_t> counts) {
  sturm_count(active_isa(), tree, shifts, scratch, counts);
}

}  // namespace canopy::kernels
