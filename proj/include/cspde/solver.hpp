#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cspde/drift.hpp"
#include "cspde/noise.hpp"
#include "cspde/parallel.hpp"
#include "cspde/rng.hpp"
#include "cspde/spectral.hpp"

namespace cspde {

struct SolverConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t save_stride = 1;
  std::optional<double> stop_radius;  // exit radius n; infinity behaves as unset
  bool record_noise = false;          // keep the Wiener increments (requires save_stride == 1)

  std::size_t n_steps() const;
  std::size_t n_saved() const { return n_steps() / save_stride + 1; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// One trajectory on the saved grid.
struct PathSample {
  std::size_t m = 0;
  std::vector<double> times;
  std::vector<double> states;  // row-major, times.size() x m
  std::optional<double> stop_radius;  // radius the path was simulated with
  std::optional<double> exit_time;
  bool exited = false;
  bool failed = false;
  double step_dt = 0.0;
  std::vector<double> noise;  // n_steps x m Wiener increments when recorded

  std::size_t size() const { return times.size(); }
  std::span<const double> state(std::size_t i) const { return {states.data() + i * m, m}; }
  std::span<const double> increment(std::size_t i) const { return {noise.data() + i * m, m}; }
  double norm(std::size_t i) const;
};

/// Drift-only part of one exponential Euler step (no noise).
void step_deterministic(const Spectrum& s, const DriftSpec& F, std::span<const double> x, double dt,
                        std::span<double> out);

/// x' = e^{-lambda dt} x + (1 - e^{-lambda dt}) lambda^{-1/2} F(x) + eta.
State step(const Spectrum& s, const DriftSpec& F, const State& x, double dt, RngStream& rng);
State step(const Spectrum& s, const DriftSpec& F, const State& x, double dt);

PathSample simulate_path(const Spectrum& s, const DriftSpec& F, const State& x0,
                         const SolverConfig& cfg, RngStream& rng);

/// Same scheme driven by given convolution increments eta (n_steps x m).
PathSample simulate_path_from_increments(const Spectrum& s, const DriftSpec& F, const State& x0,
                                         const SolverConfig& cfg, std::span<const double> eta);

/// Path i uses RngStream(seed, i). Output order is by path index.
std::vector<PathSample> simulate_ensemble(const Spectrum& s, const DriftSpec& F, const State& x0,
                                          const SolverConfig& cfg, std::size_t n_paths,
                                          std::uint64_t seed);

/// Per saved time: coordinates 0..m-1 and |X|^p (output m), over non-failed paths.
struct EnsembleStats {
  std::vector<double> times;
  std::vector<SampleSums> rows;
  std::size_t failed = 0;
  std::size_t exited = 0;
};

/// Streams the ensemble of simulate_ensemble without storing it; paths are
/// merged in blocks of kMonteCarloBlock, so results do not depend on workers.
EnsembleStats ensemble_statistics(const Spectrum& s, const DriftSpec& F, const State& x0,
                                  const SolverConfig& cfg, std::size_t n_paths, std::uint64_t seed,
                                  double p = 2.0);

struct MomentRow {
  double time;
  MCEstimate estimate;
};

/// E|X_t|^p per saved time over the non-failed paths.
std::vector<MomentRow> moment_table(std::span<const PathSample> ensemble, double p);

std::size_t count_failed(std::span<const PathSample> ensemble);

}  // namespace cspde
