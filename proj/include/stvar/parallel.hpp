#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "stvar/linalg.hpp"

namespace stvar {

/// Worker count: explicit request if positive, else STVARKIT_THREADS, else
/// the hardware concurrency.
inline Index resolve_threads(Index requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STVARKIT_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
    }
  }
  return std::max<Index>(1, static_cast<Index>(std::thread::hardware_concurrency()));
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots; the first exception is rethrown.
template <typename Fn>
void parallel_for(Index n, Index threads, Fn&& fn) {
  threads = std::min(std::max<Index>(threads, 1), n);
  if (threads <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (Index i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (Index k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace stvar
