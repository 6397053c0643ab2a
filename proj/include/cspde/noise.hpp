#pragma once

#include <span>
#include <vector>

#include "cspde/rng.hpp"
#include "cspde/spectral.hpp"

namespace cspde {

/// Independent N(0, q_k dt) draws, one per mode.
std::vector<double> sample_wiener_increments(const Spectrum& s, double dt, RngStream& rng);

/// One exact step of the stochastic convolution W_A:
/// w'_k = e^{-lambda_k dt} w_k + eta_k with eta_k ~ N(0, sigma_k^2(dt)).
State convolution_step(const Spectrum& s, const State& w, double dt, RngStream& rng);

/// Per-mode coefficients of the exact OU recursion over a fixed step, and of
/// the Wiener increment dW_k jointly Gaussian with the convolution increment.
class ConvolutionKernel {
 public:
  ConvolutionKernel(const Spectrum& s, double dt);

  double dt() const { return dt_; }
  std::span<const double> decay() const { return decay_; }
  std::span<const double> noise_sd() const { return noise_sd_; }

  /// eta_k = noise_sd_k * xi_k.
  void draw(RngStream& rng, std::span<double> eta) const;

  /// Wiener increment consistent with eta: dW_k = a_k xi_k + b_k zeta_k, where
  /// xi_k = eta_k / noise_sd_k and zeta_k comes from `aux`.
  void wiener_from(std::span<const double> eta, RngStream& aux, std::span<double> dw) const;

 private:
  double dt_;
  std::vector<double> decay_;
  std::vector<double> noise_sd_;
  std::vector<double> dw_along_;
  std::vector<double> dw_resid_;
};

}  // namespace cspde
