#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cspde/cylindrical.hpp"
#include "cspde/drift.hpp"
#include "cspde/parallel.hpp"
#include "cspde/rng.hpp"
#include "cspde/solver.hpp"
#include "cspde/spectral.hpp"

namespace cspde {

struct Marker {
  double time;
  CylindricalFunction h;
};

/// E[(M_t(f) - M_s(f)) prod_j h_j(X_{s_j})] = 0 with s_j <= s < t.
struct MartingaleTest {
  CylindricalFunction f;
  double s = 0.0;
  double t = 0.0;
  std::vector<Marker> markers;
};

/// Index of `time` on the saved grid of `path`; throws if it is not a grid point.
std::size_t grid_index(const PathSample& path, double time, const char* where);

/// Trapezoid rule for the generator integral on the saved grid. Failed paths
/// are skipped.
MCEstimate martingale_residual(std::span<const PathSample> ensemble, const MartingaleTest& test,
                               const Spectrum& s, const DriftSpec& F);

/// Generator integral truncated at the recorded exit time; every path must have
/// been simulated with stop radius n.
MCEstimate stopped_martingale_residual(std::span<const PathSample> ensemble, double n,
                                       const MartingaleTest& test, const Spectrum& s,
                                       const DriftSpec& F_n);

/// M^{(k)}_t = X^{(k)}_t - x^{(k)} + lambda_k int X^{(k)} - lambda_k^{1/2} int F^{(k)}(X).
/// Estimates E[(M_k M_j)(t) - (M_k M_j)(s)] - delta_kj q_k (t - s). Paths that
/// exited are read at t ^ tau and s ^ tau.
MCEstimate quadratic_variation_residual(std::span<const PathSample> ensemble, const Spectrum& s,
                                        const DriftSpec& F, std::size_t k, std::size_t j,
                                        double s_time, double t_time);
inline MCEstimate quadratic_variation_residual(std::span<const PathSample> ensemble,
                                               const Spectrum& s, const DriftSpec& F,
                                               std::size_t k, double s_time, double t_time) {
  return quadratic_variation_residual(ensemble, s, F, k, k, s_time, t_time);
}

/// sum_i sum_k d_k dW_k / q_k - 1/2 sum_i sum_k d_k^2 dt / q_k with
/// d_k = lambda_k^{1/2} B_k(X_{t_i}); needs recorded noise.
double girsanov_log_weight(const PathSample& path, const DriftSpec& B, const Spectrum& s);
double girsanov_weight(const PathSample& path, const DriftSpec& B, const Spectrum& s);

struct LawComparison {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> weights_a;  // empty means all ones
  std::vector<double> weights_b;
};

struct ComparisonResult {
  double ks_distance = 0.0;
  double threshold = 0.0;  // (1 - alpha) quantile of the permutation null
  double p_value = 1.0;
  bool pass = true;
  double ess_a = 0.0;
  double ess_b = 0.0;
};

double effective_sample_size(std::span<const double> weights);

/// Weighted two-sample KS distance; empty weights mean all ones.
double weighted_ks_distance(std::span<const double> a, std::span<const double> wa,
                            std::span<const double> b, std::span<const double> wb);

/// Permutation test; weights travel with their samples. Rejects when
/// p = (1 + #{perm >= observed}) / (1 + shuffles) <= alpha.
ComparisonResult weak_uniqueness_compare(const LawComparison& comp, const RngStream& rng,
                                         std::size_t shuffles = 2000, double alpha = 0.01);

struct ExpMomentResult {
  MCEstimate estimate;
  double max_share = 0.0;  // largest sample / sum
  double ess = 0.0;
  bool heavy_tail = false;  // max_share > 0.2
  std::size_t used = 0;
};

/// E exp(1/2 int_0^T sum_k lambda_k^{1/2} (Y^{(k)}_s)^2 ds), trapezoid on the saved grid.
ExpMomentResult exp_moment_probe(std::span<const PathSample> ensemble, const Spectrum& s, double T);

}  // namespace cspde
