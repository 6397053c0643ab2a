#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cspde {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a = 0.0, double b = 1.0);

struct Maximum {
  double argmax;
  double value;
};

/// Golden-section search for the maximum of a unimodal function on [a, b].
Maximum golden_section_max(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-12);

/// sup_{u>0} sqrt(2) u e^{-u^2} (1 - e^{-2u^2})^{-1/2}; the bound constant for
/// the Lambda_t kernel, approached as u -> 0+.
double lambda_kernel_constant();

/// sup_{r>0} sqrt(2) r e^{-r} (1 - e^{-2r})^{-1/2}; bounds sqrt(-A) Lambda_t.
double sqrt_lambda_kernel_constant();

/// sup_{u>=0} u e^{-u^2} = (2e)^{-1/2}; bounds sqrt(-A) e^{tA}.
double smoothing_constant();

}  // namespace cspde
