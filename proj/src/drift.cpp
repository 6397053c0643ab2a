#include "cspde/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cspde/numerics.hpp"

namespace cspde {

struct DriftSpec::Node {
  Kind kind = Kind::Zero;
  ScalarFunction fn;
  State z;
  double radius = 0.0;
  DriftSpec a;
  DriftSpec b;
};

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double>& grid_scratch(std::size_t n) {
  thread_local std::vector<double> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

void require_model(const Spectrum& s, Model model, const char* where) {
  if (s.model() != model)
    throw std::invalid_argument(std::string(where) + ": requires a " + to_string(model) +
                                " spectrum, got " + to_string(s.model()));
}

void check_finite(std::span<const double> v, const char* where) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::domain_error(std::string(where) + ": non-finite value");
}

void burgers_into(const Spectrum& s, const ScalarFunction& h, std::span<const double> x,
                  std::span<double> out) {
  require_model(s, Model::Burgers1D, "burgers_drift");
  const GridTables& g = s.grid();
  const std::size_t m = s.modes();
  const std::size_t G = g.points;
  auto& u = grid_scratch(G);
  std::span<double> uv(u.data(), G);
  grid_synthesis_into(s, x, uv);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < G; ++j) {
    const double v = h(uv[j]);
    if (!std::isfinite(v)) throw std::domain_error("burgers_drift: non-finite h(u)");
    const double* row = &g.cosine[j * m];
    const double wv = -v * g.cell_weight;
    for (std::size_t k = 0; k < m; ++k) out[k] += wv * row[k];
  }
}

void cahn_hilliard_into(const Spectrum& s, const ScalarFunction& h, std::span<const double> x,
                        std::span<double> out) {
  require_model(s, Model::CahnHilliard3D, "cahn_hilliard_drift");
  const std::size_t n = s.grid_size();
  auto& u = grid_scratch(n);
  std::span<double> uv(u.data(), n);
  grid_synthesis_into(s, x, uv);
  for (double& v : uv) v = h(v);
  check_finite(uv, "cahn_hilliard_drift");
  // Constants are orthogonal to every retained mode, so the mean drops out.
  grid_analysis_into(s, uv, out);
}

void nonlocal_into(const ScalarFunction& g, std::span<const double> x, std::span<double> out) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double factor = g(std::sqrt(r2));
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = factor * x[k];
}

void classical_burgers_into(const Spectrum& s, std::span<const double> y, std::span<double> out) {
  require_model(s, Model::Burgers1D, "classical_burgers_drift");
  const GridTables& g = s.grid();
  const std::size_t m = s.modes();
  const std::size_t G = g.points;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < G; ++j) {
    const double* srow = &g.sine[j * m];
    double u = 0.0;
    for (std::size_t k = 0; k < m; ++k) u += y[k] / static_cast<double>(k + 1) * srow[k];
    const double w = u * u * g.cell_weight;
    const double* crow = &g.cosine[j * m];
    for (std::size_t k = 0; k < m; ++k) out[k] += w * crow[k];
  }
  for (std::size_t k = 0; k < m; ++k) out[k] *= -0.5 * static_cast<double>(k + 1);
  check_finite(out, "classical_burgers_drift");
}

double norm_of(std::span<const double> x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::sqrt(r2);
}

}  // namespace

double bump_cutoff(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double v = s - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - v * v));
}

double bump_cutoff_lipschitz() {
  static const double value = [] {
    auto slope = [](double s) {
      const double v = s - 1.0;
      const double d = 1.0 - v * v;
      return bump_cutoff(s) * 2.0 * v / (d * d);
    };
    // |eta'| is unimodal on (1, 2); bracket by a coarse scan, then refine.
    double best = 1.0;
    double best_val = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double s = 1.0 + i / 1000.0;
      if (slope(s) > best_val) {
        best_val = slope(s);
        best = s;
      }
    }
    return golden_section_max(slope, best - 1e-3, best + 1e-3).value;
  }();
  return value;
}

// null node is the zero drift; children of a node are DriftSpecs themselves
DriftSpec::DriftSpec() = default;
DriftSpec::DriftSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

DriftSpec DriftSpec::zero() { return DriftSpec(); }

DriftSpec DriftSpec::constant(State z) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->z = std::move(z);
  return DriftSpec(n);
}

DriftSpec DriftSpec::burgers(ScalarFunction h) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::BurgersNemytskii;
  n->fn = std::move(h);
  return DriftSpec(n);
}

DriftSpec DriftSpec::cahn_hilliard(ScalarFunction h) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::CahnHilliardNemytskii;
  n->fn = std::move(h);
  return DriftSpec(n);
}

DriftSpec DriftSpec::nonlocal(ScalarFunction g) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Nonlocal;
  n->fn = std::move(g);
  return DriftSpec(n);
}

DriftSpec DriftSpec::classical_burgers() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::ClassicalBurgers;
  return DriftSpec(n);
}

DriftSpec DriftSpec::truncated(DriftSpec inner, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("truncated drift: radius must be > 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Truncated;
  n->a = std::move(inner);
  n->radius = radius;
  return DriftSpec(n);
}

DriftSpec DriftSpec::sum(DriftSpec a, DriftSpec b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->a = std::move(a);
  n->b = std::move(b);
  return DriftSpec(n);
}

DriftSpec DriftSpec::smoothed(DriftSpec inner) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Smoothed;
  n->a = std::move(inner);
  return DriftSpec(n);
}

const DriftSpec::Node& DriftSpec::node() const {
  static const Node empty;
  return node_ ? *node_ : empty;
}

DriftSpec::Kind DriftSpec::kind() const { return node().kind; }
const ScalarFunction& DriftSpec::function() const { return node().fn; }
const State& DriftSpec::constant_value() const { return node().z; }
double DriftSpec::radius() const { return node().radius; }
const DriftSpec& DriftSpec::first() const { return node().a; }
const DriftSpec& DriftSpec::second() const { return node().b; }

void DriftSpec::apply(const Spectrum& s, std::span<const double> x, std::span<double> out) const {
  const Node& n = node();
  switch (n.kind) {
    case Kind::Zero:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case Kind::Constant:
      s.check_state(n.z.view(), "constant drift");
      std::copy(n.z.coeffs.begin(), n.z.coeffs.end(), out.begin());
      return;
    case Kind::BurgersNemytskii: burgers_into(s, n.fn, x, out); return;
    case Kind::CahnHilliardNemytskii: cahn_hilliard_into(s, n.fn, x, out); return;
    case Kind::Nonlocal: nonlocal_into(n.fn, x, out); return;
    case Kind::ClassicalBurgers: classical_burgers_into(s, x, out); return;
    case Kind::Truncated: {
      const double eta = bump_cutoff(norm_of(x) / n.radius);
      if (eta == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      n.a.apply(s, x, out);
      if (eta != 1.0)
        for (double& v : out) v *= eta;
      return;
    }
    case Kind::Sum: {
      n.a.apply(s, x, out);
      std::vector<double> tmp(out.size());
      n.b.apply(s, x, tmp);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += tmp[k];
      return;
    }
    case Kind::Smoothed: {
      n.a.apply(s, x, out);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] /= std::sqrt(s.lambda(k));
      return;
    }
  }
}

State DriftSpec::operator()(const Spectrum& s, const State& x) const {
  s.check_state(x.view(), "drift");
  State out(s.modes());
  apply(s, x.view(), out.view());
  return out;
}

std::optional<double> DriftSpec::growth_constant(const Spectrum& s) const {
  const Node& n = node();
  switch (n.kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return n.z.norm();
    case Kind::BurgersNemytskii: {
      auto c = n.fn.growth_constant();
      if (!c) return std::nullopt;
      return *c * std::sqrt(kPi);
    }
    case Kind::CahnHilliardNemytskii: {
      auto c = n.fn.growth_constant();
      if (!c) return std::nullopt;
      return *c * std::pow(kPi, 1.5);
    }
    case Kind::Nonlocal: return n.fn.sup_norm();
    case Kind::ClassicalBurgers: return std::nullopt;
    case Kind::Truncated: {
      // |F_n(x)| <= sup_{|y| <= 2n} |F(y)|
      auto c = n.a.growth_constant(s);
      if (c) return *c * (1.0 + 2.0 * n.radius);
      auto hb = n.a.holder_bound(s, 2.0 * n.radius);
      State zero(s.modes());
      const double f0 = n.a(s, zero).norm();
      if (!hb) return std::nullopt;
      return f0 + hb->constant * std::pow(2.0 * n.radius, hb->exponent);
    }
    case Kind::Sum: {
      auto a = n.a.growth_constant(s);
      auto b = n.b.growth_constant(s);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Kind::Smoothed: {
      auto a = n.a.growth_constant(s);
      if (!a) return std::nullopt;
      const double lmin = *std::min_element(s.lambdas().begin(), s.lambdas().end());
      return *a / std::sqrt(lmin);
    }
  }
  return std::nullopt;
}

std::optional<HolderBound> DriftSpec::holder_bound(const Spectrum& s, double radius) const {
  const Node& n = node();
  const double m = static_cast<double>(s.modes());
  switch (n.kind) {
    case Kind::Zero:
    case Kind::Constant: return HolderBound{1.0, 0.0};
    case Kind::BurgersNemytskii:
    case Kind::CahnHilliardNemytskii: {
      const bool one_d = n.kind == Kind::BurgersNemytskii;
      const double volume = one_d ? kPi : kPi * kPi * kPi;
      if (auto c = n.fn.holder_constant()) {
        const double th = n.fn.holder_exponent();
        return HolderBound{th, *c * std::pow(volume, 0.5 * (1.0 - th))};
      }
      // Lipschitz on the range of u over the ball.
      const double peak = one_d ? std::sqrt(2.0 / kPi) : std::pow(2.0 / kPi, 1.5);
      const double umax = peak * std::sqrt(m) * radius;
      return HolderBound{1.0, n.fn.local_lipschitz(umax)};
    }
    case Kind::Nonlocal: {
      auto sup = n.fn.sup_norm();
      auto c = n.fn.holder_constant();
      if (!sup || !c) return std::nullopt;
      const double th = n.fn.holder_exponent();
      return HolderBound{th, *c * radius + *sup * std::pow(2.0 * radius, 1.0 - th)};
    }
    case Kind::ClassicalBurgers:
      return HolderBound{1.0, 2.0 * std::sqrt(kPi / 3.0) * radius};
    case Kind::Truncated: {
      auto inner = n.a.holder_bound(s, radius);
      if (!inner) return std::nullopt;
      double sup_inner;
      if (auto c = n.a.growth_constant(s)) {
        sup_inner = *c * (1.0 + radius);
      } else {
        State zero(s.modes());
        sup_inner = n.a(s, zero).norm() + inner->constant * std::pow(radius, inner->exponent);
      }
      const double th = inner->exponent;
      const double cut = bump_cutoff_lipschitz() / n.radius * sup_inner * std::pow(2.0 * radius, 1.0 - th);
      return HolderBound{th, inner->constant + cut};
    }
    case Kind::Sum: {
      auto a = n.a.holder_bound(s, radius);
      auto b = n.b.holder_bound(s, radius);
      if (!a || !b) return std::nullopt;
      const double th = std::min(a->exponent, b->exponent);
      const double d = 2.0 * radius;
      return HolderBound{th, a->constant * std::pow(d, a->exponent - th) +
                                 b->constant * std::pow(d, b->exponent - th)};
    }
    case Kind::Smoothed: {
      auto a = n.a.holder_bound(s, radius);
      if (!a) return std::nullopt;
      const double lmin = *std::min_element(s.lambdas().begin(), s.lambdas().end());
      return HolderBound{a->exponent, a->constant / std::sqrt(lmin)};
    }
  }
  return std::nullopt;
}

std::string DriftSpec::describe() const {
  const Node& n = node();
  std::ostringstream os;
  auto fn = [](const ScalarFunction& f) {
    std::ostringstream o;
    o << f.name() << "(a=" << f.amplitude() << ", p=" << f.exponent() << ")";
    return o.str();
  };
  switch (n.kind) {
    case Kind::Zero: os << "zero"; break;
    case Kind::Constant: os << "constant(|z|=" << n.z.norm() << ")"; break;
    case Kind::BurgersNemytskii: os << "burgers[" << fn(n.fn) << "]"; break;
    case Kind::CahnHilliardNemytskii: os << "cahn_hilliard[" << fn(n.fn) << "]"; break;
    case Kind::Nonlocal: os << "nonlocal[" << fn(n.fn) << "]"; break;
    case Kind::ClassicalBurgers: os << "classical_burgers"; break;
    case Kind::Truncated: os << "truncated(" << n.a.describe() << ", n=" << n.radius << ")"; break;
    case Kind::Sum: os << n.a.describe() << " + " << n.b.describe(); break;
    case Kind::Smoothed: os << "(-A)^{-1/2}" << n.a.describe(); break;
  }
  return os.str();
}

State burgers_drift(const Spectrum& s, const ScalarFunction& h, const State& x) {
  return DriftSpec::burgers(h)(s, x);
}

State cahn_hilliard_drift(const Spectrum& s, const ScalarFunction& h, const State& x) {
  return DriftSpec::cahn_hilliard(h)(s, x);
}

State nonlocal_drift(const Spectrum& s, const ScalarFunction& g, const State& x) {
  return DriftSpec::nonlocal(g)(s, x);
}

State classical_burgers_drift(const Spectrum& s, const State& y) {
  return DriftSpec::classical_burgers()(s, y);
}

State truncate_drift(const Spectrum& s, const DriftSpec& inner, double n, const State& x) {
  return DriftSpec::truncated(inner, n)(s, x);
}

}  // namespace cspde
