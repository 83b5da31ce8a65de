#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace refugia {

/// Worker cap: REFUGIA_THREADS if set, hardware concurrency otherwise.
inline int thread_cap() {
  if (const char* env = std::getenv("REFUGIA_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(0..n-1) over a small worker pool. Results must be written to
/// index-addressed slots so that outputs stay deterministic regardless of
/// scheduling. Exceptions escape from the calling thread only; workers that
/// throw mark the job failed and the first error is rethrown.
template <class F>
void parallel_for(int n, F&& fn) {
  const int workers = std::min(thread_cap(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace refugia
