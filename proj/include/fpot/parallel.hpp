#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fpot/common.hpp"

namespace fpot {

// Worker-count resolution: env override > config > default 1.
inline int resolve_workers(int configured) {
  if (const char* env = std::getenv("FPOT_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return configured >= 1 ? configured : 1;
}

// Maps fn over [0, n). Workers pull indices from a shared counter; fn(i)
// must write only into slot i of caller-owned storage. Results are then a
// pure function of the index, so any worker count yields identical output.
inline void parallel_for_indexed(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  workers = std::min(std::max(workers, 1), 64);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fpot
