#include "cspde/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace cspde {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_workers() {
  const char* env = std::getenv("CSPDE_THREADS");
  if (env != nullptr && *env != '\0') {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace

std::size_t worker_count() {
  std::size_t o = g_override.load();
  return o != 0 ? o : env_workers();
}

void set_worker_count(std::size_t n) { g_override.store(n); }

void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task) {
  if (n_tasks == 0) return;
  const std::size_t workers = std::min(worker_count(), n_tasks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n_tasks);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (first_error) std::rethrow_exception(first_error);
}

void SampleSums::add(std::span<const double> v) {
  ++n;
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - mean[i];
    mean[i] += d / nn;
    m2[i] += d * (v[i] - mean[i]);
  }
}

void SampleSums::merge(const SampleSums& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(o.n);
  const double nt = na + nb;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double d = o.mean[i] - mean[i];
    mean[i] += d * nb / nt;
    m2[i] += o.m2[i] + d * d * na * nb / nt;
  }
  n += o.n;
}

MCEstimate SampleSums::estimate(std::size_t i) const {
  MCEstimate e;
  e.n_samples = n;
  if (n == 0) return e;
  e.value = mean[i];
  if (n > 1) {
    const double nn = static_cast<double>(n);
    e.std_error = std::sqrt(std::max(m2[i], 0.0) / (nn - 1.0) / nn);
  }
  return e;
}

std::vector<MCEstimate> monte_carlo(
    std::size_t n_samples, const RngStream& rng, std::size_t outputs,
    const std::function<void(RngStream&, std::span<double>)>& sample) {
  if (n_samples == 0) throw std::invalid_argument("monte_carlo: sample count must be positive");
  const std::size_t n_blocks = (n_samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<SampleSums> blocks(n_blocks, SampleSums(outputs));
  parallel_for(n_blocks, [&](std::size_t b) {
    RngStream stream = rng.child(b);
    std::vector<double> out(outputs);
    const std::size_t begin = b * kMonteCarloBlock;
    const std::size_t end = std::min(n_samples, begin + kMonteCarloBlock);
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(out.begin(), out.end(), 0.0);
      sample(stream, out);
      blocks[b].add(out);
    }
  });
  SampleSums total(outputs);
  for (const auto& b : blocks) total.merge(b);
  std::vector<MCEstimate> result(outputs);
  for (std::size_t i = 0; i < outputs; ++i) result[i] = total.estimate(i);
  return result;
}

}  // namespace cspde
