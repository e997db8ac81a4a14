#pragma once

#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace msp {

// Worker cap: MSP_THREADS if set (>=1), else hardware concurrency.
inline std::size_t thread_cap() {
  if (const char* env = std::getenv("MSP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? hw : 1;
}

// Index-parallel loop with deterministic work assignment. Each index runs
// exactly once; callers write results into preallocated slots so aggregation
// order does not matter.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(thread_cap(), count == 0 ? 1 : count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

// Shortest exact decimal form used for all CSV numbers.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace msp
