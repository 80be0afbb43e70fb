#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace homest {

/// Worker count used when a caller passes 0: HOMEST_WORKERS if set, else hardware concurrency.
unsigned default_workers();

/// Runs body(i) for i in [0, n) on up to `workers` threads. The first exception thrown by any
/// body is rethrown after all threads have joined.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<Result> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

/// Pairwise (cascade) summation; the order is fixed, so results are reproducible.
double pairwise_sum(std::span<const double> values);

}  // namespace homest
