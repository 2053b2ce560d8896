#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace fdesim::detail {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. If any call throws,
/// the exception from the lowest index is rethrown after all workers finish,
/// so the reported failure does not depend on scheduling.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n, 0)));
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<int> next{0};
    std::atomic<int> first_failure{n};
    {
      std::vector<std::jthread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
          for (int i = next++; i < n; i = next++) {
            // Indices below the earliest failure always run, so the lowest
            // failing index is found regardless of thread timing.
            if (i > first_failure.load()) continue;
            try {
              fn(i);
            } catch (...) {
              errors[static_cast<std::size_t>(i)] = std::current_exception();
              int seen = first_failure.load();
              while (i < seen && !first_failure.compare_exchange_weak(seen, i)) {
              }
            }
          }
        });
      }
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace fdesim::detail
