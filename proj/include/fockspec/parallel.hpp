#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fockspec {

/// Worker count: FOCKSPEC_THREADS if set, else the requested value, else 1.
inline unsigned worker_count(unsigned requested = 0) {
  if (const char* env = std::getenv("FOCKSPEC_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return requested > 0 ? requested : 1u;
}

/**
 * @brief Runs body(i) for i in [0, n) on `workers` threads.
 *
 * Indices are split into contiguous blocks. Callers write into slot i of a
 * preallocated output, so results do not depend on the worker count. The
 * first exception thrown by any body is rethrown after all workers join.
 */
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned workers = 0) {
  const unsigned w = std::min<std::size_t>(worker_count(workers), std::max<std::size_t>(n, 1));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + w - 1) / w;
  for (unsigned t = 0; t < w; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fockspec
