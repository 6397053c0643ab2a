#include "cspde/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace cspde {

std::vector<double> sample_wiener_increments(const Spectrum& s, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_wiener_increments: dt must be > 0");
  std::vector<double> dw(s.modes());
  for (std::size_t k = 0; k < s.modes(); ++k) dw[k] = std::sqrt(s.noise(k) * dt) * rng.normal();
  return dw;
}

ConvolutionKernel::ConvolutionKernel(const Spectrum& s, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("convolution step: dt must be > 0");
  const std::size_t m = s.modes();
  decay_.resize(m);
  noise_sd_.resize(m);
  dw_along_.resize(m);
  dw_resid_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double lam = s.lambda(k);
    const double q = s.noise(k);
    decay_[k] = std::exp(-lam * dt);
    const double var_eta = qt_variance(lam, q, dt);
    noise_sd_[k] = std::sqrt(var_eta);
    // Cov(eta, dW) = q (1 - e^{-lambda dt}) / lambda
    const double cov = -q * std::expm1(-lam * dt) / lam;
    dw_along_[k] = cov / noise_sd_[k];
    dw_resid_[k] = std::sqrt(std::max(q * dt - dw_along_[k] * dw_along_[k], 0.0));
  }
}

void ConvolutionKernel::draw(RngStream& rng, std::span<double> eta) const {
  for (std::size_t k = 0; k < eta.size(); ++k) eta[k] = noise_sd_[k] * rng.normal();
}

void ConvolutionKernel::wiener_from(std::span<const double> eta, RngStream& aux,
                                    std::span<double> dw) const {
  for (std::size_t k = 0; k < eta.size(); ++k) {
    const double xi = eta[k] / noise_sd_[k];
    dw[k] = dw_along_[k] * xi + dw_resid_[k] * aux.normal();
  }
}

State convolution_step(const Spectrum& s, const State& w, double dt, RngStream& rng) {
  s.check_state(w.view(), "convolution_step");
  ConvolutionKernel kernel(s, dt);
  State out(s.modes());
  kernel.draw(rng, out.view());
  for (std::size_t k = 0; k < s.modes(); ++k) out[k] += kernel.decay()[k] * w[k];
  return out;
}

}  // namespace cspde
