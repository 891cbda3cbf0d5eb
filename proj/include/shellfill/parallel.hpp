#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace shellfill {

inline int default_thread_count() {
  if (const char* env = std::getenv("SHELLFILL_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

/// Runs f(i) for i in [0, n). Work items must write to disjoint state so the
/// result is schedule-independent.
inline void parallel_for(size_t n, const std::function<void(size_t)>& f,
                         int threads = 0) {
  if (threads <= 0) threads = default_thread_count();
  if (threads == 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    const size_t chunk = 64;
    while (true) {
      size_t begin = next.fetch_add(chunk);
      if (begin >= n) break;
      size_t end = std::min(begin + chunk, n);
      for (size_t i = begin; i < end; ++i) f(i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace shellfill
