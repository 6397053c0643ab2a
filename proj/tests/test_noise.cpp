#include <doctest.h>

#include <cmath>
#include <vector>

#include "cspde/noise.hpp"
#include "cspde/spectral.hpp"

using namespace cspde;

TEST_CASE("joint law of the convolution and Wiener increments") {
  const Spectrum s = make_custom_spectrum({1.0, 25.0}, {1.0, 0.5});
  const double dt = 0.05;
  const ConvolutionKernel K(s, dt);
  RngStream rng(3, 0), aux = rng.child(1);
  const int n = 200000;
  std::vector<double> see(2), sww(2), sew(2);
  std::vector<double> eta(2), dw(2);
  for (int i = 0; i < n; ++i) {
    K.draw(rng, eta);
    K.wiener_from(eta, aux, dw);
    for (int k = 0; k < 2; ++k) {
      see[k] += eta[k] * eta[k];
      sww[k] += dw[k] * dw[k];
      sew[k] += eta[k] * dw[k];
    }
  }
  for (int k = 0; k < 2; ++k) {
    const double lam = s.lambda(k), q = s.noise(k);
    const double var_eta = qt_variance(lam, q, dt);
    const double cov = q * (1.0 - std::exp(-lam * dt)) / lam;
    CHECK(K.decay()[k] == doctest::Approx(std::exp(-lam * dt)));
    CHECK(K.noise_sd()[k] == doctest::Approx(std::sqrt(var_eta)));
    // relative tolerance of about 5 standard errors at n = 2e5
    CHECK(see[k] / n == doctest::Approx(var_eta).epsilon(0.02));
    CHECK(sww[k] / n == doctest::Approx(q * dt).epsilon(0.02));
    CHECK(sew[k] / n == doctest::Approx(cov).epsilon(0.02));
  }
}

TEST_CASE("convolution step is deterministic per stream") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 4, 0);
  const State w(4);
  RngStream a(1, 1), b(1, 1);
  const State x = convolution_step(s, w, 0.1, a);
  const State y = convolution_step(s, w, 0.1, b);
  CHECK(x.coeffs == y.coeffs);
  CHECK_THROWS(convolution_step(s, w, -0.1, a));
  CHECK(sample_wiener_increments(s, 0.1, a).size() == 4);
}
