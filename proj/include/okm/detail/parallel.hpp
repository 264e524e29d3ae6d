#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace okm::detail {

// Worker count, read once from OKM_THREADS (default 1).
inline int thread_count() {
  static const int count = [] {
    const char* env = std::getenv("OKM_THREADS");
    if (env == nullptr) return 1;
    const int parsed = std::atoi(env);
    if (parsed < 1) return 1;
    const int hw = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    return std::min(parsed, hw * 4);
  }();
  return count;
}

// Applies fn to every index in [0, n). Indices are split into contiguous
// chunks, one per worker; each index writes only its own output slot, so the
// result is identical for any thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t t = 0; t < chunks; ++t) {
    const std::size_t begin = n * t / chunks;
    const std::size_t end = n * (t + 1) / chunks;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace okm::detail
