#include "cspde/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cspde {

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  const unsigned nn = static_cast<unsigned>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double p = std::legendre(nn, x);
      const double pm = n > 1 ? std::legendre(nn - 1, x) : 1.0;
      dp = static_cast<double>(n) * (x * p - pm) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    {
      const double p = std::legendre(nn, x);
      const double pm = n > 1 ? std::legendre(nn - 1, x) : 1.0;
      dp = static_cast<double>(n) * (x * p - pm) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

Maximum golden_section_max(const std::function<double(double)>& f, double a, double b,
                           double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

double lambda_kernel_constant() {
  // The kernel decreases on (0, inf); its supremum is the u -> 0+ limit,
  // which the search confirms by landing on the left end of the bracket.
  auto kernel = [](double u) {
    if (u <= 0.0) return 1.0;
    return std::sqrt(2.0) * u * std::exp(-u * u) / std::sqrt(-std::expm1(-2.0 * u * u));
  };
  return golden_section_max(kernel, 0.0, 10.0).value;
}

double sqrt_lambda_kernel_constant() {
  auto kernel = [](double r) {
    if (r <= 0.0) return 0.0;
    return std::sqrt(2.0) * r * std::exp(-r) / std::sqrt(-std::expm1(-2.0 * r));
  };
  return golden_section_max(kernel, 0.0, 20.0).value;
}

double smoothing_constant() { return 1.0 / std::sqrt(2.0 * std::numbers::e); }

}  // namespace cspde
