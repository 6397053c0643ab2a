#include "cspde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cspde {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonneg_time(double t, const char* where) {
  if (!(t >= 0.0)) throw std::invalid_argument(std::string(where) + ": time must be >= 0");
}

std::vector<std::array<int, 3>> cahn_hilliard_indices(std::size_t m) {
  // All k in N^3 \ {0} with |k|^2 <= R^2, grown until at least m survive.
  int radius = static_cast<int>(std::ceil(std::cbrt(6.0 * static_cast<double>(m) / kPi))) + 2;
  for (;;) {
    std::vector<std::array<int, 3>> out;
    const int r2 = radius * radius;
    for (int a = 0; a <= radius; ++a)
      for (int b = 0; b <= radius; ++b)
        for (int c = 0; c <= radius; ++c) {
          const int n2 = a * a + b * b + c * c;
          if (n2 == 0 || n2 > r2) continue;
          out.push_back({a, b, c});
        }
    if (out.size() >= m) {
      std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        const int nx = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        const int ny = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        if (nx != ny) return nx < ny;
        return x < y;
      });
      out.resize(m);
      return out;
    }
    radius *= 2;
  }
}

std::shared_ptr<const GridTables> burgers_tables(std::size_t m, std::size_t g) {
  auto t = std::make_shared<GridTables>();
  t->dim = 1;
  t->points = g;
  t->cell_weight = kPi / static_cast<double>(g);
  t->sine.resize(g * m);
  t->cosine.resize(g * m);
  const double norm = std::sqrt(2.0 / kPi);
  for (std::size_t j = 0; j < g; ++j) {
    const double xi = (static_cast<double>(j) + 0.5) * kPi / static_cast<double>(g);
    for (std::size_t k = 0; k < m; ++k) {
      const double kk = static_cast<double>(k + 1);
      t->sine[j * m + k] = norm * std::sin(kk * xi);
      t->cosine[j * m + k] = norm * std::cos(kk * xi);
    }
  }
  return t;
}

std::shared_ptr<const GridTables> cahn_hilliard_tables(std::size_t kmax, std::size_t g) {
  auto t = std::make_shared<GridTables>();
  t->dim = 3;
  t->points = g;
  t->kmax = kmax;
  const double h = kPi / static_cast<double>(g);
  t->cell_weight = h * h * h;
  t->cos1d.resize(g * (kmax + 1));
  for (std::size_t j = 0; j < g; ++j) {
    const double xi = (static_cast<double>(j) + 0.5) * h;
    for (std::size_t n = 0; n <= kmax; ++n) {
      const double c = n == 0 ? std::sqrt(1.0 / kPi) : std::sqrt(2.0 / kPi);
      t->cos1d[j * (kmax + 1) + n] = c * std::cos(static_cast<double>(n) * xi);
    }
  }
  return t;
}

}  // namespace

std::string to_string(Model model) {
  switch (model) {
    case Model::Burgers1D: return "burgers1d";
    case Model::CahnHilliard3D: return "cahn_hilliard3d";
    case Model::Custom: return "custom";
  }
  return "unknown";
}

std::string to_string(NoiseRule rule) {
  return rule == NoiseRule::Cylindrical ? "cylindrical" : "inverse_square";
}

State State::unit(std::size_t m, std::size_t k, double scale) {
  if (k >= m) throw std::out_of_range("State::unit: mode index out of range");
  State s(m);
  s.coeffs[k] = scale;
  return s;
}

double State::norm() const {
  double acc = 0.0;
  for (double c : coeffs) acc += c * c;
  return std::sqrt(acc);
}

bool State::finite() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return std::isfinite(c); });
}

const std::array<int, 3>& Spectrum::multi_index(std::size_t k) const {
  if (model_ != Model::CahnHilliard3D) throw std::logic_error("multi_index: not a 3-D spectrum");
  return multi_.at(k);
}

std::size_t Spectrum::grid_size() const {
  if (!grid_) return 0;
  std::size_t n = 1;
  for (std::size_t d = 0; d < grid_->dim; ++d) n *= grid_->points;
  return n;
}

double Spectrum::trace_ratio() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < modes(); ++k) acc += noise_[k] / lambdas_[k];
  return acc;
}

const GridTables& Spectrum::grid() const {
  if (!grid_) throw std::logic_error("spectrum has no quadrature grid (custom model)");
  return *grid_;
}

void Spectrum::check_state(std::span<const double> x, const char* where) const {
  if (x.size() != modes())
    throw std::invalid_argument(std::string(where) + ": state has " + std::to_string(x.size()) +
                                " coefficients, spectrum has " + std::to_string(modes()));
}

std::size_t min_grid_points(Model model, std::size_t m) {
  if (m == 0) throw std::invalid_argument("min_grid_points: mode count must be positive");
  switch (model) {
    case Model::Burgers1D: return 2 * m;
    case Model::CahnHilliard3D: {
      int kmax = 0;
      for (const auto& i : cahn_hilliard_indices(m)) kmax = std::max({kmax, i[0], i[1], i[2]});
      return 2 * (static_cast<std::size_t>(kmax) + 1);
    }
    case Model::Custom: break;
  }
  throw std::invalid_argument("min_grid_points: custom models have no grid");
}

Spectrum make_spectrum(Model model, std::size_t m, std::size_t grid_points, NoiseRule rule) {
  if (m == 0) throw std::invalid_argument("make_spectrum: mode count must be positive");
  Spectrum s;
  s.model_ = model;
  s.noise_rule_ = rule;
  if (grid_points == 0) grid_points = min_grid_points(model, m);
  s.grid_points_ = grid_points;
  s.lambdas_.resize(m);
  s.noise_.assign(m, 1.0);
  switch (model) {
    case Model::Burgers1D: {
      if (grid_points < 2 * m)
        throw std::invalid_argument("make_spectrum: grid_points " + std::to_string(grid_points) +
                                    " < 2m = " + std::to_string(2 * m) + " (aliasing risk)");
      for (std::size_t k = 0; k < m; ++k) s.lambdas_[k] = static_cast<double>((k + 1) * (k + 1));
      s.grid_ = burgers_tables(m, grid_points);
      break;
    }
    case Model::CahnHilliard3D: {
      s.multi_ = cahn_hilliard_indices(m);
      std::size_t kmax = 0;
      for (std::size_t k = 0; k < m; ++k) {
        const auto& i = s.multi_[k];
        const double n2 = i[0] * i[0] + i[1] * i[1] + i[2] * i[2];
        s.lambdas_[k] = n2 * n2;
        kmax = std::max<std::size_t>(kmax, static_cast<std::size_t>(std::max({i[0], i[1], i[2]})));
      }
      if (grid_points < 2 * (kmax + 1))
        throw std::invalid_argument("make_spectrum: grid_points " + std::to_string(grid_points) +
                                    " < 2(kmax+1) = " + std::to_string(2 * (kmax + 1)) +
                                    " (aliasing risk)");
      s.grid_ = cahn_hilliard_tables(kmax, grid_points);
      break;
    }
    case Model::Custom:
      throw std::invalid_argument("make_spectrum: use make_custom_spectrum for custom models");
  }
  if (rule == NoiseRule::InverseSquare) {
    // 1/k^2 in the flat mode index, i.e. 1/lambda_k for the 1-D model.
    for (std::size_t k = 0; k < m; ++k) s.noise_[k] = 1.0 / static_cast<double>((k + 1) * (k + 1));
  }
  return s;
}

Spectrum make_custom_spectrum(std::vector<double> lambdas, std::vector<double> noise_coeffs) {
  if (lambdas.empty()) throw std::invalid_argument("make_custom_spectrum: no modes");
  if (noise_coeffs.empty()) noise_coeffs.assign(lambdas.size(), 1.0);
  if (noise_coeffs.size() != lambdas.size())
    throw std::invalid_argument("make_custom_spectrum: noise/eigenvalue length mismatch");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0)) throw std::invalid_argument("make_custom_spectrum: eigenvalues must be > 0");
    if (!(noise_coeffs[k] > 0.0)) throw std::invalid_argument("make_custom_spectrum: noise weights must be > 0");
  }
  Spectrum s;
  s.model_ = Model::Custom;
  s.lambdas_ = std::move(lambdas);
  s.noise_ = std::move(noise_coeffs);
  return s;
}

State semigroup_apply(const Spectrum& s, double t, const State& x) {
  require_nonneg_time(t, "semigroup_apply");
  s.check_state(x.view(), "semigroup_apply");
  State y(s.modes());
  for (std::size_t k = 0; k < s.modes(); ++k) y[k] = std::exp(-s.lambda(k) * t) * x[k];
  return y;
}

State frac_power_apply(const Spectrum& s, double gamma, const State& x) {
  s.check_state(x.view(), "frac_power_apply");
  State y(s.modes());
  for (std::size_t k = 0; k < s.modes(); ++k) y[k] = std::pow(s.lambda(k), gamma) * x[k];
  return y;
}

double qt_variance(double lambda, double q, double t) {
  return -q * std::expm1(-2.0 * lambda * t) / (2.0 * lambda);
}

double lambda_op_coeff(double lambda, double q, double t) {
  return std::sqrt(2.0 * lambda / q) * std::exp(-t * lambda) /
         std::sqrt(-std::expm1(-2.0 * t * lambda));
}

std::vector<double> qt_variances(const Spectrum& s, double t) {
  require_nonneg_time(t, "qt_variances");
  std::vector<double> v(s.modes());
  for (std::size_t k = 0; k < s.modes(); ++k) v[k] = qt_variance(s.lambda(k), s.noise(k), t);
  return v;
}

std::vector<double> lambda_op_coeffs(const Spectrum& s, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("lambda_op_coeffs: t must be > 0");
  std::vector<double> v(s.modes());
  for (std::size_t k = 0; k < s.modes(); ++k) v[k] = lambda_op_coeff(s.lambda(k), s.noise(k), t);
  return v;
}

State gamma_shift(const Spectrum& s, double t, const State& z) {
  require_nonneg_time(t, "gamma_shift");
  s.check_state(z.view(), "gamma_shift");
  State y(s.modes());
  for (std::size_t k = 0; k < s.modes(); ++k)
    y[k] = -std::expm1(-t * s.lambda(k)) / std::sqrt(s.lambda(k)) * z[k];
  return y;
}

State project(const Spectrum& s, std::size_t m_sub, const State& x) {
  s.check_state(x.view(), "project");
  if (m_sub == 0 || m_sub > s.modes())
    throw std::invalid_argument("project: m_sub must be in [1, " + std::to_string(s.modes()) + "]");
  State y = x;
  std::fill(y.coeffs.begin() + static_cast<std::ptrdiff_t>(m_sub), y.coeffs.end(), 0.0);
  return y;
}

void grid_synthesis_into(const Spectrum& s, std::span<const double> x, std::span<double> out) {
  const GridTables& g = s.grid();
  const std::size_t m = s.modes();
  if (out.size() != s.grid_size()) throw std::invalid_argument("grid_synthesis: output length mismatch");
  if (g.dim == 1) {
    for (std::size_t j = 0; j < g.points; ++j) {
      const double* row = &g.sine[j * m];
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += x[k] * row[k];
      out[j] = acc;
    }
    return;
  }
  const std::size_t G = g.points;
  const std::size_t K = g.kmax + 1;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    if (x[k] == 0.0) continue;
    const auto& idx = s.multi_index(k);
    for (std::size_t a = 0; a < G; ++a) {
      const double ca = x[k] * g.cos1d[a * K + static_cast<std::size_t>(idx[0])];
      for (std::size_t b = 0; b < G; ++b) {
        const double cab = ca * g.cos1d[b * K + static_cast<std::size_t>(idx[1])];
        double* dst = &out[(a * G + b) * G];
        for (std::size_t c = 0; c < G; ++c) dst[c] += cab * g.cos1d[c * K + static_cast<std::size_t>(idx[2])];
      }
    }
  }
}

void grid_analysis_into(const Spectrum& s, std::span<const double> values, std::span<double> out) {
  const GridTables& g = s.grid();
  const std::size_t m = s.modes();
  if (values.size() != s.grid_size())
    throw std::invalid_argument("grid_analysis: expected " + std::to_string(s.grid_size()) +
                                " grid values, got " + std::to_string(values.size()));
  std::fill(out.begin(), out.end(), 0.0);
  if (g.dim == 1) {
    for (std::size_t j = 0; j < g.points; ++j) {
      const double* row = &g.sine[j * m];
      const double v = values[j] * g.cell_weight;
      for (std::size_t k = 0; k < m; ++k) out[k] += v * row[k];
    }
    return;
  }
  const std::size_t G = g.points;
  const std::size_t K = g.kmax + 1;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& idx = s.multi_index(k);
    double acc = 0.0;
    for (std::size_t a = 0; a < G; ++a) {
      const double ca = g.cos1d[a * K + static_cast<std::size_t>(idx[0])];
      for (std::size_t b = 0; b < G; ++b) {
        const double cab = ca * g.cos1d[b * K + static_cast<std::size_t>(idx[1])];
        const double* src = &values[(a * G + b) * G];
        double inner = 0.0;
        for (std::size_t c = 0; c < G; ++c) inner += src[c] * g.cos1d[c * K + static_cast<std::size_t>(idx[2])];
        acc += cab * inner;
      }
    }
    out[k] = acc * g.cell_weight;
  }
}

std::vector<double> grid_synthesis(const Spectrum& s, const State& x) {
  s.check_state(x.view(), "grid_synthesis");
  std::vector<double> out(s.grid_size());
  grid_synthesis_into(s, x.view(), out);
  return out;
}

State grid_analysis(const Spectrum& s, std::span<const double> values) {
  State out(s.modes());
  grid_analysis_into(s, values, out.view());
  return out;
}

}  // namespace cspde
