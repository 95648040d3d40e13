#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace symq {

// Worker cap: SYMQ_THREADS if set, else hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("SYMQ_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static range split of [0, n); fn(begin, end) per worker.  Deterministic
// results require fn outputs keyed by index, not by completion order.
inline void parallel_ranges(std::size_t n,
                            const std::function<void(std::size_t, std::size_t)>& fn) {
  std::size_t workers = std::min<std::size_t>(thread_budget(), n == 0 ? 1 : n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t b = w * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back(fn, b, e);
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace symq
