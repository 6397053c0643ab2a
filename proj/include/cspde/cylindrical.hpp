#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cspde/rng.hpp"
#include "cspde/spectral.hpp"

namespace cspde {

struct CylindricalMeta {
  std::optional<double> sup_norm;
  double holder_exponent = 1.0;
  std::optional<double> holder_constant;
  bool smooth = true;  // C^2 with bounded derivatives where declared
};

/// f(x) = g(x_{i_1}, ..., x_{i_n}) for distinct zero-based mode indices.
///
/// Built-ins carry analytic gradients and Hessians; user kernels without them
/// fall back to central differences with step 1e-5.
class CylindricalFunction {
 public:
  using Kernel = std::function<double(std::span<const double>)>;
  // grad(y, out[n]); hess(y, out[n*n], row-major)
  using Gradient = std::function<void(std::span<const double>, std::span<double>)>;
  using Hessian = std::function<void(std::span<const double>, std::span<double>)>;

  using Meta = CylindricalMeta;

  CylindricalFunction(std::string name, std::vector<std::size_t> indices, Kernel kernel,
                      Gradient grad = {}, Hessian hess = {}, Meta meta = {});

  const std::string& name() const { return name_; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t arity() const { return indices_.size(); }
  const Meta& meta() const { return meta_; }

  /// Value on the active coordinates y (length arity()).
  double local(std::span<const double> y) const { return kernel_(y); }
  void local_gradient(std::span<const double> y, std::span<double> out) const;
  void local_hessian(std::span<const double> y, std::span<double> out) const;

  /// Value at a full state; every index must be < x.size().
  double operator()(std::span<const double> x) const;
  double operator()(const State& x) const { return (*this)(x.view()); }

  /// C^theta norm sup + seminorm from the declared metadata, if both are known.
  std::optional<double> holder_norm() const;

  void check_indices(std::size_t m, const char* where) const;

 private:
  std::string name_;
  std::vector<std::size_t> indices_;
  Kernel kernel_;
  Gradient grad_;
  Hessian hess_;
  Meta meta_;
};

// Catalogue. `i` is a zero-based mode index.
CylindricalFunction cyl_constant(double c);
/// slope * x_i; `box` declares the range |x_i| <= box on which it is treated as bounded.
CylindricalFunction cyl_linear(std::size_t i, double slope = 1.0, double box = 0.0);
CylindricalFunction cyl_square(std::size_t i);
CylindricalFunction cyl_cos(std::size_t i, double freq = 1.0);
CylindricalFunction cyl_sin(std::size_t i, double freq = 1.0);
/// max(-1, min(1, x_i))
CylindricalFunction cyl_clipped_linear(std::size_t i);
/// sign(x_i) min(|x_i|, 1)^theta
CylindricalFunction cyl_kink(std::size_t i, double theta);
/// exp(-x_i^2 / w^2)
CylindricalFunction cyl_gaussian(std::size_t i, double width = 1.0);
/// sin(x_i) cos(x_j)
CylindricalFunction cyl_sin_cos(std::size_t i, std::size_t j);

/// Catalogue lookup: constant, linear, square, cos, sin, clipped_linear, kink,
/// gaussian, sin_cos (uses i and i+1).
CylindricalFunction catalogue_function(const std::string& name, std::size_t i = 0,
                                       double theta = 0.5);

/// Independent centred Gaussian coordinates with the given variances.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::vector<double> variances);
  std::size_t dim() const { return sd_.size(); }
  void draw(RngStream& rng, std::span<double> out) const;
  State draw(RngStream& rng) const;

 private:
  std::vector<double> sd_;
};

/// N(0, S) with per-mode variance q_k / (2 lambda_k).
GaussianSampler invariant_measure_sampler(const Spectrum& s);

}  // namespace cspde
