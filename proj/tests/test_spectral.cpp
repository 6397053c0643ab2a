#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cspde/numerics.hpp"
#include "cspde/spectral.hpp"

using namespace cspde;

namespace {

// composite Simpson, used as an independent oracle
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("burgers eigenvalues and noise") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 5, 0);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(s.lambda(k) == doctest::Approx(double((k + 1) * (k + 1))));
    CHECK(s.noise(k) == 1.0);
  }
  const Spectrum t = make_spectrum(Model::Burgers1D, 5, 0, NoiseRule::InverseSquare);
  CHECK(t.noise(2) == doctest::Approx(1.0 / 9.0));
  CHECK(s.grid_points() >= min_grid_points(Model::Burgers1D, 5));
  CHECK_THROWS_AS(make_spectrum(Model::Burgers1D, 5, 3), std::invalid_argument);
}

TEST_CASE("cahn-hilliard eigenvalues are |k|^4 in increasing order") {
  const Spectrum s = make_spectrum(Model::CahnHilliard3D, 10, 0);
  for (std::size_t k = 0; k < s.modes(); ++k) {
    const auto& n = s.multi_index(k);
    const double k2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
    CHECK(s.lambda(k) == doctest::Approx(k2 * k2));
    if (k > 0) CHECK(s.lambda(k) >= s.lambda(k - 1));
  }
  CHECK(s.lambda(0) == doctest::Approx(1.0));
}

TEST_CASE("convolution variance matches the integral of e^{-2 lambda s}") {
  for (double lam : {1.0, 7.0, 400.0})
    for (double t : {1e-3, 0.1, 2.0}) {
      const double ref = simpson([&](double u) { return std::exp(-2.0 * lam * u); }, 0.0, t);
      CHECK(qt_variance(lam, 1.0, t) == doctest::Approx(ref).epsilon(1e-9));
      CHECK(qt_variance(lam, 0.5, t) == doctest::Approx(0.5 * ref).epsilon(1e-9));
    }
  CHECK(qt_variance(3.0, 1.0, 0.0) == 0.0);
}

TEST_CASE("Lambda_t coefficient") {
  const double lam = 4.0, t = 0.3;
  const double expect = std::sqrt(2.0 * lam) * std::exp(-lam * t) / std::sqrt(1.0 - std::exp(-2.0 * lam * t));
  CHECK(lambda_op_coeff(lam, 1.0, t) == doctest::Approx(expect));
  CHECK(lambda_op_coeff(lam, 4.0, t) == doctest::Approx(expect / 2.0));
}

TEST_CASE("bound constants against dense scans") {
  double c1 = 0.0, c2 = 0.0, cs = 0.0;
  for (int i = 1; i <= 200000; ++i) {
    const double r = i * 5e-5;
    c1 = std::max(c1, std::sqrt(2.0) * std::sqrt(r) * std::exp(-r) / std::sqrt(1.0 - std::exp(-2.0 * r)));
    c2 = std::max(c2, std::sqrt(2.0) * r * std::exp(-r) / std::sqrt(1.0 - std::exp(-2.0 * r)));
    cs = std::max(cs, std::sqrt(r) * std::exp(-r));
  }
  CHECK(lambda_kernel_constant() == doctest::Approx(1.0));
  CHECK(lambda_kernel_constant() >= c1);
  CHECK(sqrt_lambda_kernel_constant() == doctest::Approx(c2).epsilon(1e-8));
  CHECK(sqrt_lambda_kernel_constant() == doctest::Approx(0.569038767524637).epsilon(1e-11));
  CHECK(smoothing_constant() == doctest::Approx(cs).epsilon(1e-8));
  CHECK(smoothing_constant() == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::e)));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto q = gauss_legendre(8, -1.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 15);
  CHECK(s == doctest::Approx((std::pow(2.0, 16) - 1.0) / 16.0).epsilon(1e-12));
}

TEST_CASE("golden section") {
  const auto mx = golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0);
  CHECK(mx.argmax == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("grid synthesis and analysis are inverse on the retained modes") {
  for (Model model : {Model::Burgers1D, Model::CahnHilliard3D}) {
    const Spectrum s = make_spectrum(model, 7, 0);
    State x(7);
    for (std::size_t k = 0; k < 7; ++k) x[k] = std::sin(1.0 + k);
    const State y = grid_analysis(s, grid_synthesis(s, x));
    for (std::size_t k = 0; k < 7; ++k) CHECK(y[k] == doctest::Approx(x[k]).epsilon(1e-12));
  }
}

TEST_CASE("semigroup, fractional powers and gamma shift") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 3, 0);
  const State x(std::vector<double>{1.0, 1.0, 1.0});
  const State y = semigroup_apply(s, 0.5, x);
  CHECK(y[1] == doctest::Approx(std::exp(-2.0)));
  const State r = frac_power_apply(s, 0.5, x);
  CHECK(r[2] == doctest::Approx(3.0));
  const State g = gamma_shift(s, 0.5, x);
  CHECK(g[1] == doctest::Approx((1.0 - std::exp(-2.0)) / 2.0));
  const State p = project(s, 2, x);
  CHECK(p[2] == 0.0);
  CHECK(p[1] == 1.0);
}

TEST_CASE("custom spectrum validation") {
  CHECK_THROWS(make_custom_spectrum({1.0, -2.0}, {1.0, 1.0}));
  CHECK_THROWS(make_custom_spectrum({1.0}, {1.0, 1.0}));
  const Spectrum s = make_custom_spectrum({2.0}, {1.0});
  CHECK(s.trace_ratio() == doctest::Approx(0.5));
}
