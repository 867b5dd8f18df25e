#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fovkit {

namespace detail {
inline std::atomic<int>& thread_count_slot() {
  static std::atomic<int> n{0};  // 0 = unset, resolve lazily from env
  return n;
}
}  // namespace detail

/// Set the worker count for data-parallel loops. 1 disables threading.
inline void set_threads(int n) { detail::thread_count_slot().store(n < 1 ? 1 : n); }

inline int threads() {
  int n = detail::thread_count_slot().load();
  if (n == 0) {
    n = 1;
    if (const char* env = std::getenv("FOVKIT_THREADS")) {
      const int parsed = std::atoi(env);
      if (parsed > 1) n = parsed;
    }
    detail::thread_count_slot().store(n);
  }
  return n;
}

/// Run fn(i) for i in [0, count). Work is partitioned by index block, so the
/// result of each i is written by exactly one thread and the output is
/// identical for every thread count.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int nthreads = std::min(threads(), count);
  if (nthreads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  const int chunk = (count + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace fovkit
