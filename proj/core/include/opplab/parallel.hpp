#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace opplab {

// Worker count: OPPLAB_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs task(i) for i in [0, n). Tasks may run concurrently and in any order;
// callers write into per-task slots and reduce afterwards so results never
// depend on scheduling. The first exception thrown by a task is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

// Neumaier-compensated sum. Result is independent of thread layout because
// callers always feed it a fixed-order span.
double compensated_sum(std::span<const double> values);

class CompensatedAccumulator {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace opplab
