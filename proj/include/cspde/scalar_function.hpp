#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cspde {

/// Closed catalogue of real functions used as Nemytskii kernels h and as
/// norm-dependent factors g, each with exact regularity metadata.
class ScalarFunction {
 public:
  enum class Kind {
    Zero,
    Constant,      // a
    Identity,      // a s
    SignedPower,   // a sign(s) |s|^p
    ClippedPower,  // a sign(s) min(|s|, 1)^p
    ClippedSqrt,   // a min(sqrt|s|, 1)
    Square,        // a s^2
    Tanh,          // a tanh(s)
    Table,         // piecewise linear, constant beyond the ends
  };

  ScalarFunction() = default;

  static ScalarFunction zero();
  static ScalarFunction constant(double c);
  static ScalarFunction identity(double a = 1.0);
  static ScalarFunction signed_power(double p, double a = 1.0);
  static ScalarFunction clipped_power(double p, double a = 1.0);
  static ScalarFunction clipped_sqrt(double a = 1.0);
  static ScalarFunction square(double a = 1.0);
  static ScalarFunction tanh(double a = 1.0);
  static ScalarFunction table(std::vector<double> xs, std::vector<double> ys);

  /// Build from a catalogue name ("identity", "signed_power", ...).
  static ScalarFunction from_name(const std::string& name, double amplitude, double exponent);

  double operator()(double s) const;

  Kind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double exponent() const { return exponent_; }
  std::string name() const;
  const std::vector<double>& table_x() const { return xs_; }
  const std::vector<double>& table_y() const { return ys_; }

  /// Same function with the amplitude multiplied by `factor`.
  ScalarFunction scaled(double factor) const;

  std::optional<double> sup_norm() const;
  /// Exponent of the global Holder bound; 1 means Lipschitz.
  double holder_exponent() const;
  /// Global Holder constant for holder_exponent(), if one exists.
  std::optional<double> holder_constant() const;
  /// Lipschitz constant of the function restricted to [-r, r].
  double local_lipschitz(double r) const;
  /// c with |h(s)| <= c (1 + |s|), if the function grows at most linearly.
  std::optional<double> growth_constant() const;

 private:
  Kind kind_ = Kind::Zero;
  double amplitude_ = 0.0;
  double exponent_ = 1.0;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

}  // namespace cspde
