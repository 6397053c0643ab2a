#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cspde/cylindrical.hpp"
#include "cspde/drift.hpp"
#include "cspde/parallel.hpp"
#include "cspde/rng.hpp"
#include "cspde/spectral.hpp"

namespace cspde {

/// Time quadrature for integrals of e^{-lambda t} g(t) over (0, inf).
///
/// t = T_max tau^p with T_max = decay_span / lambda, tau in [0, 1] split into
/// geometric panels [0, r^{P-1}], ..., [r, 1], Gauss-Legendre on each. The error
/// estimate compares against the half-order rule on the same samples.
struct QuadratureSpec {
  std::size_t nodes_per_panel = 16;
  std::size_t panels = 6;
  double panel_ratio = 0.25;
  double decay_span = 36.0;
};

struct ResolventEstimate {
  MCEstimate mc;
  double quad_error = 0.0;
  double tail_bound = 0.0;
  double budget(double se_factor = 3.0) const {
    return se_factor * mc.std_error + quad_error + tail_bound;
  }
};

/// P_t^{(z)} f(x) by sampling the Gaussian law N(e^{tA}x + Gamma_t z, Q_t) on the
/// active modes of f. t = 0 returns f(x) exactly.
MCEstimate ou_eval(const Spectrum& s, const State& z, double t, const CylindricalFunction& f,
                   const State& x, std::size_t n_samples, const RngStream& rng);

/// D_h P_t^{(z)} f(x) via the antithetic Bismut weight
/// (f(m + sigma xi) - f(m - sigma xi)) / 2 * sum_k l_k(t) h_k xi_k.
MCEstimate ou_derivative(const Spectrum& s, const State& z, double t, const CylindricalFunction& f,
                         const State& x, const State& h, std::size_t n_samples,
                         const RngStream& rng);

/// Central difference (P_t f(x + eps h) - P_t f(x - eps h)) / (2 eps) with
/// common random numbers, one difference per sample.
MCEstimate ou_finite_difference(const Spectrum& s, const State& z, double t,
                                const CylindricalFunction& f, const State& x, const State& h,
                                double eps, std::size_t n_samples, const RngStream& rng);

ResolventEstimate resolvent_eval(const Spectrum& s, const State& z, double lambda,
                                 const CylindricalFunction& f, const State& x,
                                 std::size_t n_samples, const RngStream& rng,
                                 const QuadratureSpec& quad = {});

/// <D u(x), h> for the resolvent u; time substitution exponent 2 / theta.
ResolventEstimate resolvent_gradient(const Spectrum& s, const State& z, double lambda,
                                     const CylindricalFunction& f, const State& x, const State& h,
                                     std::size_t n_samples, const RngStream& rng,
                                     const QuadratureSpec& quad = {},
                                     std::optional<double> theta = std::nullopt);

/// <D u(x), (-A)^{1/2} l>.
ResolventEstimate sqrtA_gradient_of_resolvent(const Spectrum& s, const State& z, double lambda,
                                              const CylindricalFunction& f, const State& x,
                                              const State& l, std::size_t n_samples,
                                              const RngStream& rng, const QuadratureSpec& quad = {},
                                              std::optional<double> theta = std::nullopt);

/// 1/2 sum_j q_j d_jj f - sum_j lambda_j x_j d_j f + sum_j lambda_j^{1/2} F_j(x) d_j f.
double generator_apply(const Spectrum& s, const DriftSpec& F, const CylindricalFunction& f,
                       std::span<const double> x);
double generator_apply(const Spectrum& s, const DriftSpec& F, const CylindricalFunction& f,
                       const State& x);

/// lambda R f(x) - R(L^{(z)} f)(x) - f(x) with common random numbers.
/// tail_bound = 3 |f|_0 e^{-lambda T_max}.
ResolventEstimate resolvent_identity_residual(const Spectrum& s, const State& z, double lambda,
                                              const CylindricalFunction& f, const State& x,
                                              std::size_t n_samples, const RngStream& rng,
                                              const QuadratureSpec& quad = {});

struct HolderNormEstimate {
  double sup_estimate = 0.0;
  double seminorm_lower_bound = 0.0;
};

/// Sampled lower bounds of |f|_0 and [f]_theta over M independent pairs.
HolderNormEstimate holder_norm_estimate(const CylindricalFunction& f, double theta,
                                        const GaussianSampler& sampler, std::size_t pairs,
                                        const RngStream& rng);

struct RegularityRow {
  double lambda = 0.0;
  double max_abs = 0.0;    // max over family x probes of |<D u, (-A)^{1/2} l>|
  double std_error = 0.0;  // of the maximizing estimate
  double scaled = 0.0;     // lambda^{theta/2} max_abs
  std::size_t argmax_function = 0;
  std::size_t argmax_x = 0;
  std::size_t argmax_l = 0;
};

struct RegularityReport {
  std::vector<RegularityRow> rows;
  double scaled_ratio = 0.0;  // max / min of the scaled column
  bool strictly_decreasing = false;  // consecutive drops exceed 3 combined SE
};

/// Sweeps a family of Holder test functions over probe points and directions.
RegularityReport verify_regularity_scaling(const Spectrum& s, const State& z,
                                           const std::vector<CylindricalFunction>& family,
                                           double theta, const std::vector<double>& lambdas,
                                           const std::vector<State>& x_probes,
                                           const std::vector<State>& l_probes,
                                           std::size_t n_samples, const RngStream& rng,
                                           const QuadratureSpec& quad = {});

struct ContractionRow {
  double lambda = 0.0;
  double phi_sup = 0.0;
  double phi_seminorm = 0.0;
  double g_norm = 0.0;
  double ratio = 0.0;  // (phi_sup + phi_seminorm) / g_norm, compared with 1/2
};

/// phi(x) = <F(x) - z, (-A)^{1/2} D R_lambda g(x)> on the probes; seminorm from
/// consecutive probe pairs.
std::vector<ContractionRow> contraction_check(const Spectrum& s, const State& z,
                                              const DriftSpec& F, const CylindricalFunction& g,
                                              double theta, const std::vector<double>& lambdas,
                                              const std::vector<State>& probes,
                                              std::size_t n_samples, const RngStream& rng,
                                              const QuadratureSpec& quad = {});

}  // namespace cspde
