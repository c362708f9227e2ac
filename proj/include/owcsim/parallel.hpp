#pragma once

// Deterministic fan-out helpers. parallel_for hands each worker a contiguous
// index range; callers store per-index results and reduce afterwards with
// pairwise_sum, so numbers never depend on the worker count.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace owcsim {

// Worker count: explicit request, else OWC_SIM_THREADS, else the hardware.
inline int resolve_worker_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OWC_SIM_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::invalid_argument("OWC_SIM_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         int workers = 0) {
  int w = resolve_worker_count(workers);
  if (n == 0) return;
  if (w <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(w), n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::size_t chunk = (n + nw - 1) / nw;
  std::exception_ptr err;
  std::mutex err_mu;
  for (std::size_t t = 0; t < nw; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// Order-stable summation: reduces adjacent pairs until one value remains.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  std::vector<double> buf(v.begin(), v.end());
  std::size_t n = buf.size();
  while (n > 1) {
    std::size_t m = 0;
    for (std::size_t i = 0; i + 1 < n; i += 2) buf[m++] = buf[i] + buf[i + 1];
    if (n % 2 == 1) buf[m++] = buf[n - 1];
    n = m;
  }
  return buf[0];
}

inline double pairwise_mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("pairwise_mean: empty range");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace owcsim
