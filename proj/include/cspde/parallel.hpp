#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cspde/rng.hpp"

namespace cspde {

/// Worker count: explicit override if set, else CSPDE_THREADS, else hardware.
std::size_t worker_count();
/// 0 restores the environment/hardware default.
void set_worker_count(std::size_t n);

/// Runs task(i) for i in [0, n_tasks) on the worker pool. Rethrows the first
/// exception raised by any task after all workers have joined.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

/// Value, standard error and sample count of a Monte-Carlo average.
struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/// Combined standard error of the difference of two independent estimates.
inline double combined_se(const MCEstimate& a, const MCEstimate& b) {
  return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

inline constexpr std::size_t kMonteCarloBlock = 2048;

/// Per-output running mean and centred second moment (Welford / Chan merge).
struct SampleSums {
  std::vector<double> mean;
  std::vector<double> m2;
  std::size_t n = 0;

  explicit SampleSums(std::size_t outputs = 0) : mean(outputs, 0.0), m2(outputs, 0.0) {}
  void add(std::span<const double> v);
  void merge(const SampleSums& o);
  MCEstimate estimate(std::size_t i) const;
  /// Unbiased sample variance of output i (0 for fewer than two samples).
  double variance(std::size_t i) const { return n > 1 ? m2[i] / static_cast<double>(n - 1) : 0.0; }
};

/// Deterministic blocked Monte-Carlo driver.
///
/// Block b draws from rng.child(b) and the block sums are merged in block
/// order, so results do not depend on the number of workers.
/// sample(stream, out) fills one sample of `outputs` values.
std::vector<MCEstimate> monte_carlo(
    std::size_t n_samples, const RngStream& rng, std::size_t outputs,
    const std::function<void(RngStream&, std::span<double>)>& sample);

}  // namespace cspde
