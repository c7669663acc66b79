#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace confaudit {

// Worker count: CONFAUDIT_THREADS env override, else hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("CONFAUDIT_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

// Static chunked loop. Each index must write only its own output slot; under
// that contract results are identical for any worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = thread_count();
  if (workers <= 1 || n < 2 * static_cast<std::size_t>(workers)) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = static_cast<std::size_t>(w) * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace confaudit
