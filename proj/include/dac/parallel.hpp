#pragma once

// Replica-parallel loops. Results are stored by replica index, so the output
// never depends on the thread count or on scheduling.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dac {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// out[i] = f(state, i) for i in [0, n), with one state = make_state() per
// worker. f must not let state carry information between replicas.
template <class T, class MakeState, class F>
std::vector<T> run_replicas_with_state(std::int64_t n, int threads, MakeState&& make_state, F&& f) {
  std::vector<T> out(static_cast<std::size_t>(n));
  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), std::max<std::int64_t>(n, 1)));
  if (workers <= 1) {
    auto state = make_state();
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(state, i);
    return out;
  }
  constexpr std::int64_t kChunk = 64;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    try {
      auto state = make_state();
      for (;;) {
        const std::int64_t begin = next.fetch_add(kChunk);
        if (begin >= n) return;
        const std::int64_t end = std::min(n, begin + kChunk);
        for (std::int64_t i = begin; i < end; ++i) out[static_cast<std::size_t>(i)] = f(state, i);
      }
    } catch (...) {
      const std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

// out[i] = f(i) for i in [0, n).
template <class T, class F>
std::vector<T> run_replicas(std::int64_t n, int threads, F&& f) {
  return run_replicas_with_state<T>(
      n, threads, [] { return 0; }, [&](int&, std::int64_t i) { return f(i); });
}

}  // namespace dac
