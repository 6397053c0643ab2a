#include "cspde/cylindrical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace cspde {

namespace {

constexpr double kFdStep = 1e-5;
constexpr std::size_t kMaxArity = 16;

double sgn(double v) { return v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0); }

}  // namespace

CylindricalFunction::CylindricalFunction(std::string name, std::vector<std::size_t> indices,
                                         Kernel kernel, Gradient grad, Hessian hess, Meta meta)
    : name_(std::move(name)),
      indices_(std::move(indices)),
      kernel_(std::move(kernel)),
      grad_(std::move(grad)),
      hess_(std::move(hess)),
      meta_(meta) {
  if (!kernel_) throw std::invalid_argument("cylindrical function: missing kernel");
  if (indices_.size() > kMaxArity)
    throw std::invalid_argument("cylindrical function: too many active indices");
  auto sorted = indices_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("cylindrical function: indices must be distinct");
}

void CylindricalFunction::local_gradient(std::span<const double> y, std::span<double> out) const {
  if (grad_) {
    grad_(y, out);
    return;
  }
  std::array<double, kMaxArity> yy{};
  std::copy(y.begin(), y.end(), yy.begin());
  std::span<const double> v(yy.data(), y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    yy[j] = y[j] + kFdStep;
    const double fp = kernel_(v);
    yy[j] = y[j] - kFdStep;
    const double fm = kernel_(v);
    yy[j] = y[j];
    out[j] = (fp - fm) / (2.0 * kFdStep);
  }
}

void CylindricalFunction::local_hessian(std::span<const double> y, std::span<double> out) const {
  if (hess_) {
    hess_(y, out);
    return;
  }
  const std::size_t n = y.size();
  std::array<double, kMaxArity> yy{};
  std::copy(y.begin(), y.end(), yy.begin());
  std::span<const double> v(yy.data(), n);
  const double h = kFdStep;
  const double f0 = kernel_(v);
  for (std::size_t a = 0; a < n; ++a) {
    yy[a] = y[a] + h;
    const double fp = kernel_(v);
    yy[a] = y[a] - h;
    const double fm = kernel_(v);
    yy[a] = y[a];
    out[a * n + a] = (fp - 2.0 * f0 + fm) / (h * h);
    for (std::size_t b = a + 1; b < n; ++b) {
      double acc = 0.0;
      for (int sa : {1, -1}) {
        for (int sb : {1, -1}) {
          yy[a] = y[a] + sa * h;
          yy[b] = y[b] + sb * h;
          acc += sa * sb * kernel_(v);
        }
      }
      yy[a] = y[a];
      yy[b] = y[b];
      out[a * n + b] = out[b * n + a] = acc / (4.0 * h * h);
    }
  }
}

double CylindricalFunction::operator()(std::span<const double> x) const {
  std::array<double, kMaxArity> y{};
  for (std::size_t j = 0; j < indices_.size(); ++j) y[j] = x[indices_[j]];
  return kernel_(std::span<const double>(y.data(), indices_.size()));
}

std::optional<double> CylindricalFunction::holder_norm() const {
  if (!meta_.sup_norm || !meta_.holder_constant) return std::nullopt;
  return *meta_.sup_norm + *meta_.holder_constant;
}

void CylindricalFunction::check_indices(std::size_t m, const char* where) const {
  for (std::size_t i : indices_)
    if (i >= m)
      throw std::invalid_argument(std::string(where) + ": function index " + std::to_string(i + 1) +
                                  " exceeds mode count " + std::to_string(m));
}

CylindricalFunction cyl_constant(double c) {
  CylindricalFunction::Meta meta;
  meta.sup_norm = std::abs(c);
  meta.holder_constant = 0.0;
  return CylindricalFunction(
      "constant", {}, [c](std::span<const double>) { return c; },
      [](std::span<const double>, std::span<double>) {},
      [](std::span<const double>, std::span<double>) {}, meta);
}

CylindricalFunction cyl_linear(std::size_t i, double slope, double box) {
  CylindricalFunction::Meta meta;
  if (box > 0.0) meta.sup_norm = std::abs(slope) * box;
  meta.holder_constant = std::abs(slope);
  return CylindricalFunction(
      "linear", {i}, [slope](std::span<const double> y) { return slope * y[0]; },
      [slope](std::span<const double>, std::span<double> g) { g[0] = slope; },
      [](std::span<const double>, std::span<double> h) { h[0] = 0.0; }, meta);
}

CylindricalFunction cyl_square(std::size_t i) {
  CylindricalFunction::Meta meta;
  return CylindricalFunction(
      "square", {i}, [](std::span<const double> y) { return y[0] * y[0]; },
      [](std::span<const double> y, std::span<double> g) { g[0] = 2.0 * y[0]; },
      [](std::span<const double>, std::span<double> h) { h[0] = 2.0; }, meta);
}

CylindricalFunction cyl_cos(std::size_t i, double freq) {
  CylindricalFunction::Meta meta;
  meta.sup_norm = 1.0;
  meta.holder_constant = std::abs(freq);
  return CylindricalFunction(
      "cos", {i}, [freq](std::span<const double> y) { return std::cos(freq * y[0]); },
      [freq](std::span<const double> y, std::span<double> g) { g[0] = -freq * std::sin(freq * y[0]); },
      [freq](std::span<const double> y, std::span<double> h) {
        h[0] = -freq * freq * std::cos(freq * y[0]);
      },
      meta);
}

CylindricalFunction cyl_sin(std::size_t i, double freq) {
  CylindricalFunction::Meta meta;
  meta.sup_norm = 1.0;
  meta.holder_constant = std::abs(freq);
  return CylindricalFunction(
      "sin", {i}, [freq](std::span<const double> y) { return std::sin(freq * y[0]); },
      [freq](std::span<const double> y, std::span<double> g) { g[0] = freq * std::cos(freq * y[0]); },
      [freq](std::span<const double> y, std::span<double> h) {
        h[0] = -freq * freq * std::sin(freq * y[0]);
      },
      meta);
}

CylindricalFunction cyl_clipped_linear(std::size_t i) {
  CylindricalFunction::Meta meta;
  meta.sup_norm = 1.0;
  meta.holder_constant = 1.0;
  meta.smooth = false;
  return CylindricalFunction(
      "clipped_linear", {i}, [](std::span<const double> y) { return std::clamp(y[0], -1.0, 1.0); },
      [](std::span<const double> y, std::span<double> g) { g[0] = std::abs(y[0]) < 1.0 ? 1.0 : 0.0; },
      [](std::span<const double>, std::span<double> h) { h[0] = 0.0; }, meta);
}

CylindricalFunction cyl_kink(std::size_t i, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("kink: theta must be in (0, 1]");
  CylindricalFunction::Meta meta;
  meta.sup_norm = 1.0;
  meta.holder_exponent = theta;
  meta.holder_constant = std::pow(2.0, 1.0 - theta);
  meta.smooth = false;
  return CylindricalFunction(
      "kink", {i},
      [theta](std::span<const double> y) {
        return sgn(y[0]) * std::pow(std::min(std::abs(y[0]), 1.0), theta);
      },
      [theta](std::span<const double> y, std::span<double> g) {
        const double a = std::abs(y[0]);
        g[0] = (a >= 1.0 || a == 0.0) ? 0.0 : theta * std::pow(a, theta - 1.0);
      },
      [theta](std::span<const double> y, std::span<double> h) {
        const double a = std::abs(y[0]);
        h[0] = (a >= 1.0 || a == 0.0) ? 0.0 : sgn(y[0]) * theta * (theta - 1.0) * std::pow(a, theta - 2.0);
      },
      meta);
}

CylindricalFunction cyl_gaussian(std::size_t i, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian: width must be > 0");
  CylindricalFunction::Meta meta;
  meta.sup_norm = 1.0;
  // max |d/dy e^{-y^2/w^2}| = sqrt(2/e) / w
  meta.holder_constant = std::sqrt(2.0 / std::exp(1.0)) / width;
  const double w2 = width * width;
  return CylindricalFunction(
      "gaussian", {i}, [w2](std::span<const double> y) { return std::exp(-y[0] * y[0] / w2); },
      [w2](std::span<const double> y, std::span<double> g) {
        g[0] = -2.0 * y[0] / w2 * std::exp(-y[0] * y[0] / w2);
      },
      [w2](std::span<const double> y, std::span<double> h) {
        const double e = std::exp(-y[0] * y[0] / w2);
        h[0] = (4.0 * y[0] * y[0] / (w2 * w2) - 2.0 / w2) * e;
      },
      meta);
}

CylindricalFunction cyl_sin_cos(std::size_t i, std::size_t j) {
  CylindricalFunction::Meta meta;
  meta.sup_norm = 1.0;
  meta.holder_constant = 1.0;  // |grad| = sqrt(cos^2 a cos^2 b + sin^2 a sin^2 b) <= 1
  return CylindricalFunction(
      "sin_cos", {i, j},
      [](std::span<const double> y) { return std::sin(y[0]) * std::cos(y[1]); },
      [](std::span<const double> y, std::span<double> g) {
        g[0] = std::cos(y[0]) * std::cos(y[1]);
        g[1] = -std::sin(y[0]) * std::sin(y[1]);
      },
      [](std::span<const double> y, std::span<double> h) {
        const double s0 = std::sin(y[0]), c0 = std::cos(y[0]);
        const double s1 = std::sin(y[1]), c1 = std::cos(y[1]);
        h[0] = -s0 * c1;
        h[1] = h[2] = -c0 * s1;
        h[3] = -s0 * c1;
      },
      meta);
}

CylindricalFunction catalogue_function(const std::string& name, std::size_t i, double theta) {
  if (name == "constant") return cyl_constant(1.0);
  if (name == "linear") return cyl_linear(i, 1.0, 0.0);
  if (name == "square") return cyl_square(i);
  if (name == "cos") return cyl_cos(i);
  if (name == "sin") return cyl_sin(i);
  if (name == "clipped_linear") return cyl_clipped_linear(i);
  if (name == "kink") return cyl_kink(i, theta);
  if (name == "gaussian") return cyl_gaussian(i);
  if (name == "sin_cos") return cyl_sin_cos(i, i + 1);
  throw std::invalid_argument("unknown test function '" + name + "'");
}

GaussianSampler::GaussianSampler(std::vector<double> variances) {
  sd_.reserve(variances.size());
  for (double v : variances) {
    if (!(v >= 0.0)) throw std::invalid_argument("GaussianSampler: negative variance");
    sd_.push_back(std::sqrt(v));
  }
}

void GaussianSampler::draw(RngStream& rng, std::span<double> out) const {
  for (std::size_t k = 0; k < sd_.size(); ++k) out[k] = sd_[k] * rng.normal();
}

State GaussianSampler::draw(RngStream& rng) const {
  State x(sd_.size());
  draw(rng, x.view());
  return x;
}

GaussianSampler invariant_measure_sampler(const Spectrum& s) {
  std::vector<double> var(s.modes());
  for (std::size_t k = 0; k < s.modes(); ++k) var[k] = s.noise(k) / (2.0 * s.lambda(k));
  return GaussianSampler(std::move(var));
}

}  // namespace cspde
