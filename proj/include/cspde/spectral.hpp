#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cspde {

enum class Model { Burgers1D, CahnHilliard3D, Custom };
enum class NoiseRule { Cylindrical, InverseSquare };

std::string to_string(Model model);
std::string to_string(NoiseRule rule);

/// Truncated coefficient vector in the eigenbasis of A.
struct State {
  std::vector<double> coeffs;

  State() = default;
  explicit State(std::size_t m) : coeffs(m, 0.0) {}
  explicit State(std::vector<double> c) : coeffs(std::move(c)) {}

  /// Basis vector e_{k+1} (k is zero-based).
  static State unit(std::size_t m, std::size_t k, double scale = 1.0);

  std::size_t size() const { return coeffs.size(); }
  double& operator[](std::size_t k) { return coeffs[k]; }
  double operator[](std::size_t k) const { return coeffs[k]; }
  std::span<const double> view() const { return coeffs; }
  std::span<double> view() { return coeffs; }
  double norm() const;
  bool finite() const;
};

class GridTables;

/// Eigenvalues, noise weights and quadrature grid for one Galerkin truncation.
///
/// Immutable after construction; copies share the grid tables.
class Spectrum {
 public:
  Model model() const { return model_; }
  std::size_t modes() const { return lambdas_.size(); }
  std::span<const double> lambdas() const { return lambdas_; }
  std::span<const double> noise_coeffs() const { return noise_; }
  double lambda(std::size_t k) const { return lambdas_[k]; }
  double noise(std::size_t k) const { return noise_[k]; }
  std::size_t grid_points() const { return grid_points_; }
  NoiseRule noise_rule() const { return noise_rule_; }

  /// Multi-index (k1,k2,k3) of flat mode k; CahnHilliard3D only.
  const std::array<int, 3>& multi_index(std::size_t k) const;

  /// Number of values on the quadrature grid (grid_points^dim).
  std::size_t grid_size() const;

  /// Sum_k q_k / lambda_k over the truncation.
  double trace_ratio() const;

  const GridTables& grid() const;
  bool has_grid() const { return grid_ != nullptr; }

  void check_state(std::span<const double> x, const char* where) const;

 private:
  friend Spectrum make_spectrum(Model, std::size_t, std::size_t, NoiseRule);
  friend Spectrum make_custom_spectrum(std::vector<double>, std::vector<double>);

  Model model_ = Model::Custom;
  NoiseRule noise_rule_ = NoiseRule::Cylindrical;
  std::vector<double> lambdas_;
  std::vector<double> noise_;
  std::vector<std::array<int, 3>> multi_;
  std::size_t grid_points_ = 0;
  std::shared_ptr<const GridTables> grid_;
};

/// Tabulated eigenfunctions on the midpoint quadrature grid.
class GridTables {
 public:
  std::size_t dim = 1;
  std::size_t points = 0;      // per dimension
  double cell_weight = 0.0;    // quadrature weight per node
  // Burgers1D: sine[j*m + k] = e_k(xi_j), cosine[j*m + k] = sqrt(2/pi) cos(k xi_j)
  std::vector<double> sine;
  std::vector<double> cosine;
  // CahnHilliard3D: cos1d[j*(kmax+1) + n] = c_n cos(n xi_j), normalized per axis
  std::vector<double> cos1d;
  std::size_t kmax = 0;
};

/// Smallest grid accepted by make_spectrum.
std::size_t min_grid_points(Model model, std::size_t m);

/// grid_points = 0 picks min_grid_points(model, m).
Spectrum make_spectrum(Model model, std::size_t m, std::size_t grid_points,
                       NoiseRule rule = NoiseRule::Cylindrical);
Spectrum make_custom_spectrum(std::vector<double> lambdas, std::vector<double> noise_coeffs);

State semigroup_apply(const Spectrum& s, double t, const State& x);
State frac_power_apply(const Spectrum& s, double gamma, const State& x);
std::vector<double> qt_variances(const Spectrum& s, double t);
std::vector<double> lambda_op_coeffs(const Spectrum& s, double t);
State gamma_shift(const Spectrum& s, double t, const State& z);
State project(const Spectrum& s, std::size_t m_sub, const State& x);

std::vector<double> grid_synthesis(const Spectrum& s, const State& x);
State grid_analysis(const Spectrum& s, std::span<const double> values);

// Span forms for inner loops; `out` must be sized by the caller.
void grid_synthesis_into(const Spectrum& s, std::span<const double> x, std::span<double> out);
void grid_analysis_into(const Spectrum& s, std::span<const double> values, std::span<double> out);

/// Scalar kernels behind the operators above, one mode at a time.
double qt_variance(double lambda, double q, double t);
double lambda_op_coeff(double lambda, double q, double t);

}  // namespace cspde
