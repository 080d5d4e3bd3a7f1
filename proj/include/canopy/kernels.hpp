#pragma once

// Batched tree recursions. Every kernel walks a breadth-first numbered tree from
// the leaves to the root once and carries M independent lanes (energies or shifts)
// per vertex, stored vertex-major: value(v, j) = buf[v * M + j].
//
// Each kernel exists as a scalar reference and an AVX2 variant. Both evaluate the
// same floating-point expressions in the same order (no FMA contraction), so the
// variants agree bit for bit; the equivalence tests check this.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "canopy/graphs.hpp"

namespace canopy::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
/// Best instruction set supported by this CPU and build.
Isa detected_isa();
/// Instruction set used by the dispatching entry points. Defaults to
/// detected_isa(), or to the value of the CANOPY_ISA environment variable
/// ("scalar" / "avx2") when set.
Isa active_isa();
/// Overrides the dispatch choice (tests, benchmarks). Throws if unsupported.
void set_active_isa(Isa isa);

struct TreeView {
  std::span<const Vertex> child_offsets;  // size n + 1
  std::span<const double> diagonal;       // size n
  std::size_t vertex_count() const { return diagonal.size(); }
};

inline constexpr std::size_t kNoSingularVertex = std::numeric_limits<std::size_t>::max();
/// Pivots with both components below this magnitude are treated as singular.
inline constexpr double kSingularPivot = 1e-300;
/// Replacement for vanishing Sturm pivots (sign chosen negative).
inline constexpr double kSturmPivotFloor = 1e-280;

/// Forward Green function Gamma(v; z_j) = 1/(d_v - z_j - sum_{c child of v} Gamma(c; z_j))
/// for all vertices and energies. Returns the first vertex (in processing order)
/// with a singular pivot, or kNoSingularVertex.
std::size_t forward_green(TreeView tree, std::span<const double> z_re, std::span<const double> z_im,
                          std::span<double> g_re, std::span<double> g_im);
std::size_t forward_green(Isa isa, TreeView tree, std::span<const double> z_re,
                          std::span<const double> z_im, std::span<double> g_re,
                          std::span<double> g_im);

/// Number of eigenvalues strictly below each shift, from the signs of the pivots
/// d_v = diag_v - s - sum_c 1/d_c (Sylvester inertia of the tree LDL^T).
/// `scratch` holds n * M doubles.
void sturm_count(TreeView tree, std::span<const double> shifts, std::span<double> scratch,
                 std::span<std::uint32_t> counts);
void sturm_count(Isa isa, TreeView tree, std::span<const double> shifts, std::span<double> scratch,
                 std::span<std::uint32_t> counts);

namespace detail {
std::size_t forward_green_scalar(TreeView, std::span<const double>, std::span<const double>,
                                 std::span<double>, std::span<double>);
void sturm_count_scalar(TreeView, std::span<const double>, std::span<double>,
                        std::span<std::uint32_t>);
#if defined(CANOPY_HAVE_AVX2)
std::size_t forward_green_avx2(TreeView, std::span<const double>, std::span<const double>,
                               std::span<double>, std::span<double>);
void sturm_count_avx2(TreeView, std::span<const double>, std::span<double>,
                      std::span<std::uint32_t>);
#endif
}  // namespace detail

}  // namespace canopy::kernels
