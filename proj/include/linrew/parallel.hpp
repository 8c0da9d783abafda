#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace linrew {

// Worker cap: LINREW_THREADS if set, else the hardware concurrency.
inline size_t worker_count() {
  if (const char *env = std::getenv("LINREW_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1)
      return static_cast<size_t>(n);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Calls body(index, worker) for every index in [0, n). Each worker id is
// used by one thread only, so callers can keep per-worker scratch state.
template <class Body> void parallel_for(size_t n, size_t workers, Body body) {
  workers = std::max<size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i)
      body(i, size_t{0});
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (size_t i = next++; i < n; i = next++)
          body(i, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error)
          error = std::current_exception();
        next = n;
      }
    });
  for (auto &t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace linrew
