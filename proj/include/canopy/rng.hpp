#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace canopy {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of realization `r` in an ensemble: the mixed master seed xor'ed with the
/// realization index. Independent of how realizations are scheduled on threads.
inline constexpr std::uint64_t realization_seed(std::uint64_t master, std::uint64_t r) noexcept {
  return splitmix64(master) ^ r;
}

/// Per-worker random stream. mt19937_64 output is bit-specified by the standard, and the
/// real-valued transforms below are written out so draws are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one value per call, the pair partner is discarded).
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace canopy
