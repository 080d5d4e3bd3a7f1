#include "canopy/ensemble.hpp"

#include <cstdlib>
#include <string>

namespace canopy {

namespace {
std::atomic<std::size_t> g_override{0};
}

void set_thread_override(std::size_t threads) { g_override.store(threads); }

std::size_t default_thread_count() {
  if (const std::size_t o = g_override.load(); o > 0) return o;
  if (const char* env = std::getenv("CANOPY_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace canopy
