#ifndef EVOSTAB_PARALLEL_HPP
#define EVOSTAB_PARALLEL_HPP

#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace evostab {

/// Thread budget: min(hardware, EVOSTAB_THREADS if set). At least 1.
inline int thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  int n = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* env = std::getenv("EVOSTAB_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

/// Runs fn(i) for i in [0, count). Work items must be independent; results
/// should be written to preallocated per-index slots so the outcome is
/// deterministic regardless of the thread count. The first exception thrown
/// by a worker is rethrown on the calling thread after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  int nthreads = thread_budget();
  if (nthreads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex guard;
  std::size_t chunk = (count + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn, &failure, &guard] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace evostab

#endif
