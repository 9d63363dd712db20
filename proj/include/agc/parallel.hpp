#pragma once

#include <atomic>
#include <cstdlib>
#include <cstddef>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace agc {

namespace detail {

inline int initial_thread_count() {
  if (const char* env = std::getenv("AGC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline std::atomic<int>& thread_count_ref() {
  static std::atomic<int> count{initial_thread_count()};
  return count;
}

}  // namespace detail

inline int thread_count() { return detail::thread_count_ref().load(); }

/// n <= 0 restores the default (AGC_THREADS env, else all cores).
inline void set_thread_count(int n) {
  detail::thread_count_ref().store(n >= 1 ? n : detail::initial_thread_count());
}

/// Runs fn(i) for i in [0, n). Work is split into contiguous index ranges,
/// one per worker. Each item is computed wholly by one thread, so results
/// are identical for every thread count. The first exception thrown by any
/// worker is rethrown on the calling thread after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  std::vector<std::exception_ptr> errors(workers, nullptr);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, &errors, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  try {
    for (std::size_t i = 0; i < std::min(chunk, n); ++i) fn(i);
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace agc
