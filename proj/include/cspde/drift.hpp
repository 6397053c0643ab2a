#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "cspde/scalar_function.hpp"
#include "cspde/spectral.hpp"

namespace cspde {

/// Global Holder bound |F(x) - F(y)| <= constant |x - y|^exponent on a ball.
struct HolderBound {
  double exponent;
  double constant;
};

/// Nonlinearity F: H -> H in spectral coordinates.
///
/// Value type over an immutable expression tree; safe to share across threads.
class DriftSpec {
 public:
  enum class Kind {
    Zero,
    Constant,
    BurgersNemytskii,
    CahnHilliardNemytskii,
    Nonlocal,
    ClassicalBurgers,
    Truncated,
    Sum,
    Smoothed,  // (-A)^{-1/2} applied to the inner drift
  };

  DriftSpec();

  static DriftSpec zero();
  static DriftSpec constant(State z);
  static DriftSpec burgers(ScalarFunction h);
  static DriftSpec cahn_hilliard(ScalarFunction h);
  static DriftSpec nonlocal(ScalarFunction g);
  static DriftSpec classical_burgers();
  static DriftSpec truncated(DriftSpec inner, double radius);
  static DriftSpec sum(DriftSpec a, DriftSpec b);
  static DriftSpec smoothed(DriftSpec inner);

  Kind kind() const;
  bool is_zero() const { return kind() == Kind::Zero; }

  /// Writes F(x) into out (both of length s.modes()).
  /// Throws std::domain_error on non-finite intermediate values.
  void apply(const Spectrum& s, std::span<const double> x, std::span<double> out) const;
  State operator()(const Spectrum& s, const State& x) const;

  /// C_F with |F(x)| <= C_F (1 + |x|), when the drift grows at most linearly.
  std::optional<double> growth_constant(const Spectrum& s) const;
  /// Holder bound valid on the ball of the given radius.
  std::optional<HolderBound> holder_bound(const Spectrum& s, double radius) const;

  // Accessors for the node parameters (meaningful for the matching kind).
  const ScalarFunction& function() const;
  const State& constant_value() const;
  double radius() const;
  const DriftSpec& first() const;
  const DriftSpec& second() const;

  /// One-line human readable description.
  std::string describe() const;

 private:
  struct Node;
  explicit DriftSpec(std::shared_ptr<const Node> node);
  const Node& node() const;
  std::shared_ptr<const Node> node_;
};

/// F^(k)(x) = -sqrt(2/pi) \int_0^pi h(u(xi)) cos(k xi) dxi with u the grid image of x.
State burgers_drift(const Spectrum& s, const ScalarFunction& h, const State& x);
/// Mean-free Nemytskii image h(u) - <h(u)>, analyzed back onto the modes.
State cahn_hilliard_drift(const Spectrum& s, const ScalarFunction& h, const State& x);
/// g(|x|) x.
State nonlocal_drift(const Spectrum& s, const ScalarFunction& g, const State& x);
/// H^1_0 coefficients of (1/2) (-A)^{-1/2} d/dxi [u^2], u = sum_k (y_k / k) e_k:
/// F_k = -(k/2) sqrt(2/pi) \int_0^pi u^2 cos(k xi) dxi.
State classical_burgers_drift(const Spectrum& s, const State& y);
/// eta(|x| / n) F(x).
State truncate_drift(const Spectrum& s, const DriftSpec& inner, double n, const State& x);

/// Smooth cutoff: 1 on [0,1], 0 on [2,inf), exp(1 - 1/(1-(s-1)^2)) between.
double bump_cutoff(double s);
/// max |eta'|.
double bump_cutoff_lipschitz();

}  // namespace cspde
