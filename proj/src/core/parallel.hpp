#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace cms {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static chunked parallel loop.  `fn(i)` must only write to state owned by
// item i (typically a preallocated slot), so the result is independent of the
// thread count; reductions are done by the caller in index order afterwards.
template <typename Fn>
void parallel_for(long n, int threads, Fn&& fn) {
  if (n <= 0) return;
  int t = std::min<long>(resolve_threads(threads), n);
  if (t <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(t));
  long chunk = (n + t - 1) / t;
  for (int w = 0; w < t; ++w) {
    long lo = w * chunk;
    long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);  // lowest-range error wins: deterministic
}

}  // namespace cms
