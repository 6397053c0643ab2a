#include "cspde/scalar_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cspde {

namespace {

ScalarFunction::Kind kind_from_name(const std::string& name) {
  using K = ScalarFunction::Kind;
  if (name == "zero") return K::Zero;
  if (name == "constant") return K::Constant;
  if (name == "identity") return K::Identity;
  if (name == "signed_power") return K::SignedPower;
  if (name == "clipped_power") return K::ClippedPower;
  if (name == "clipped_sqrt") return K::ClippedSqrt;
  if (name == "square") return K::Square;
  if (name == "tanh") return K::Tanh;
  throw std::invalid_argument("unknown scalar function '" + name + "'");
}

}  // namespace

ScalarFunction ScalarFunction::zero() { return ScalarFunction(); }

ScalarFunction ScalarFunction::constant(double c) {
  ScalarFunction f;
  f.kind_ = Kind::Constant;
  f.amplitude_ = c;
  return f;
}

ScalarFunction ScalarFunction::identity(double a) {
  ScalarFunction f;
  f.kind_ = Kind::Identity;
  f.amplitude_ = a;
  return f;
}

ScalarFunction ScalarFunction::signed_power(double p, double a) {
  if (!(p > 0.0)) throw std::invalid_argument("signed_power: exponent must be > 0");
  ScalarFunction f;
  f.kind_ = Kind::SignedPower;
  f.amplitude_ = a;
  f.exponent_ = p;
  return f;
}

ScalarFunction ScalarFunction::clipped_power(double p, double a) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("clipped_power: exponent must be in (0, 1]");
  ScalarFunction f;
  f.kind_ = Kind::ClippedPower;
  f.amplitude_ = a;
  f.exponent_ = p;
  return f;
}

ScalarFunction ScalarFunction::clipped_sqrt(double a) {
  ScalarFunction f;
  f.kind_ = Kind::ClippedSqrt;
  f.amplitude_ = a;
  f.exponent_ = 0.5;
  return f;
}

ScalarFunction ScalarFunction::square(double a) {
  ScalarFunction f;
  f.kind_ = Kind::Square;
  f.amplitude_ = a;
  f.exponent_ = 2.0;
  return f;
}

ScalarFunction ScalarFunction::tanh(double a) {
  ScalarFunction f;
  f.kind_ = Kind::Tanh;
  f.amplitude_ = a;
  return f;
}

ScalarFunction ScalarFunction::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 2 || xs.size() != ys.size())
    throw std::invalid_argument("table: need matching x/y arrays with at least two points");
  if (!std::is_sorted(xs.begin(), xs.end()) ||
      std::adjacent_find(xs.begin(), xs.end()) != xs.end())
    throw std::invalid_argument("table: x values must be strictly increasing");
  ScalarFunction f;
  f.kind_ = Kind::Table;
  f.amplitude_ = 1.0;
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  return f;
}

ScalarFunction ScalarFunction::from_name(const std::string& name, double amplitude, double exponent) {
  switch (kind_from_name(name)) {
    case Kind::Zero: return zero();
    case Kind::Constant: return constant(amplitude);
    case Kind::Identity: return identity(amplitude);
    case Kind::SignedPower: return signed_power(exponent, amplitude);
    case Kind::ClippedPower: return clipped_power(exponent, amplitude);
    case Kind::ClippedSqrt: return clipped_sqrt(amplitude);
    case Kind::Square: return square(amplitude);
    case Kind::Tanh: return tanh(amplitude);
    case Kind::Table: break;
  }
  throw std::invalid_argument("from_name: tables are not built from a name");
}

std::string ScalarFunction::name() const {
  switch (kind_) {
    case Kind::Zero: return "zero";
    case Kind::Constant: return "constant";
    case Kind::Identity: return "identity";
    case Kind::SignedPower: return "signed_power";
    case Kind::ClippedPower: return "clipped_power";
    case Kind::ClippedSqrt: return "clipped_sqrt";
    case Kind::Square: return "square";
    case Kind::Tanh: return "tanh";
    case Kind::Table: return "table";
  }
  return "unknown";
}

ScalarFunction ScalarFunction::scaled(double factor) const {
  ScalarFunction f = *this;
  if (kind_ == Kind::Table) {
    for (double& y : f.ys_) y *= factor;
  } else {
    f.amplitude_ *= factor;
  }
  return f;
}

double ScalarFunction::operator()(double s) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return amplitude_;
    case Kind::Identity: return amplitude_ * s;
    case Kind::SignedPower: {
      const double v = std::pow(std::abs(s), exponent_);
      return s < 0.0 ? -amplitude_ * v : amplitude_ * v;
    }
    case Kind::ClippedPower: {
      const double v = std::pow(std::min(std::abs(s), 1.0), exponent_);
      return s < 0.0 ? -amplitude_ * v : amplitude_ * v;
    }
    case Kind::ClippedSqrt: return amplitude_ * std::min(std::sqrt(std::abs(s)), 1.0);
    case Kind::Square: return amplitude_ * s * s;
    case Kind::Tanh: return amplitude_ * std::tanh(s);
    case Kind::Table: {
      if (s <= xs_.front()) return ys_.front();
      if (s >= xs_.back()) return ys_.back();
      auto it = std::upper_bound(xs_.begin(), xs_.end(), s);
      const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
      const double w = (s - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
    }
  }
  return 0.0;
}

std::optional<double> ScalarFunction::sup_norm() const {
  const double a = std::abs(amplitude_);
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Constant:
    case Kind::ClippedPower:
    case Kind::ClippedSqrt:
    case Kind::Tanh: return a;
    case Kind::Table: {
      double m = 0.0;
      for (double y : ys_) m = std::max(m, std::abs(y));
      return m;
    }
    case Kind::Identity:
    case Kind::SignedPower:
    case Kind::Square: return a == 0.0 ? std::optional<double>(0.0) : std::nullopt;
  }
  return std::nullopt;
}

double ScalarFunction::holder_exponent() const {
  switch (kind_) {
    case Kind::SignedPower: return std::min(exponent_, 1.0);
    case Kind::ClippedPower:
    case Kind::ClippedSqrt: return exponent_;
    default: return 1.0;
  }
}

std::optional<double> ScalarFunction::holder_constant() const {
  const double a = std::abs(amplitude_);
  switch (kind_) {
    case Kind::Zero:
    case Kind::Constant: return 0.0;
    case Kind::Identity:
    case Kind::Tanh: return a;
    case Kind::SignedPower:
      if (exponent_ > 1.0) return std::nullopt;
      [[fallthrough]];
    case Kind::ClippedPower:
      // worst case s' = -s: 2 s^p / (2 s)^p
      return a * std::pow(2.0, 1.0 - exponent_);
    case Kind::ClippedSqrt: return a;
    case Kind::Square: return std::nullopt;
    case Kind::Table: return local_lipschitz(0.0);
  }
  return std::nullopt;
}

double ScalarFunction::local_lipschitz(double r) const {
  const double a = std::abs(amplitude_);
  switch (kind_) {
    case Kind::Zero:
    case Kind::Constant: return 0.0;
    case Kind::Identity:
    case Kind::Tanh: return a;
    case Kind::Square: return 2.0 * a * r;
    case Kind::SignedPower:
      if (exponent_ >= 1.0) return a * exponent_ * std::pow(r, exponent_ - 1.0);
      return std::numeric_limits<double>::infinity();
    case Kind::ClippedPower:
    case Kind::ClippedSqrt:
      return exponent_ >= 1.0 ? a : std::numeric_limits<double>::infinity();
    case Kind::Table: {
      double l = 0.0;
      for (std::size_t i = 1; i < xs_.size(); ++i)
        l = std::max(l, std::abs(ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]));
      return l;
    }
  }
  return std::numeric_limits<double>::infinity();
}

std::optional<double> ScalarFunction::growth_constant() const {
  const double a = std::abs(amplitude_);
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Constant:
    case Kind::Identity:
    case Kind::ClippedPower:
    case Kind::ClippedSqrt:
    case Kind::Tanh: return a;
    case Kind::SignedPower:
      if (exponent_ <= 1.0) return a;  // |s|^p <= 1 + |s|
      return a == 0.0 ? std::optional<double>(0.0) : std::nullopt;
    case Kind::Square: return a == 0.0 ? std::optional<double>(0.0) : std::nullopt;
    case Kind::Table: return sup_norm();
  }
  return std::nullopt;
}

}  // namespace cspde
