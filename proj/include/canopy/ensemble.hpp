#pragma once

// Realization-parallel map. Each index is processed exactly once by some worker;
// results are stored by index, so any later reduction runs in index order and the
// output does not depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace canopy {

/// Worker count: the process-wide override if set, else CANOPY_THREADS (>= 1), else
/// the hardware concurrency.
std::size_t default_thread_count();
/// Process-wide worker count; 0 clears the override.
void set_thread_override(std::size_t threads);

template <class F>
auto map_realizations(std::size_t count, F&& f, std::size_t threads = 0)
    -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(count);
  if (threads == 0) threads = default_thread_count();
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace canopy
