#include "cspde/kolmogorov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cspde/numerics.hpp"

namespace cspde {

namespace {

constexpr std::size_t kMaxActive = 16;

// Per-time-node Gaussian parameters restricted to the active modes of f.
struct Node {
  double t = 0.0;
  double w_full = 0.0;
  double w_half = 0.0;
  std::array<double, kMaxActive> mean{};
  std::array<double, kMaxActive> sd{};
  std::array<double, kMaxActive> ell{};
};

Node make_node(const Spectrum& s, const State& z, const State& x,
               const std::vector<std::size_t>& idx, double t) {
  Node nd;
  nd.t = t;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const std::size_t k = idx[j];
    const double lam = s.lambda(k);
    const double q = s.noise(k);
    const double decay = std::exp(-lam * t);
    nd.mean[j] = decay * x[k] - std::expm1(-lam * t) / std::sqrt(lam) * z[k];
    nd.sd[j] = std::sqrt(qt_variance(lam, q, t));
    nd.ell[j] = t > 0.0 ? lambda_op_coeff(lam, q, t) : 0.0;
  }
  return nd;
}

struct TimeRule {
  std::vector<Node> nodes;
  double t_max = 0.0;
};

TimeRule time_rule(const Spectrum& s, const State& z, const State& x,
                   const std::vector<std::size_t>& idx, double lambda, const QuadratureSpec& q,
                   double power) {
  if (q.nodes_per_panel < 2 || q.panels == 0 || !(q.panel_ratio > 0.0 && q.panel_ratio < 1.0) ||
      !(q.decay_span > 0.0))
    throw std::invalid_argument("quadrature: invalid specification");
  TimeRule rule;
  rule.t_max = q.decay_span / lambda;
  std::vector<double> breaks{0.0};
  for (std::size_t j = q.panels; j-- > 0;) breaks.push_back(std::pow(q.panel_ratio, static_cast<double>(j)));
  auto add = [&](double tau, double w, bool full) {
    const double t = rule.t_max * std::pow(tau, power);
    const double jac = rule.t_max * power * std::pow(tau, power - 1.0);
    Node nd = make_node(s, z, x, idx, t);
    const double weight = w * jac * std::exp(-lambda * t);
    (full ? nd.w_full : nd.w_half) = weight;
    rule.nodes.push_back(nd);
  };
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const QuadratureRule full = gauss_legendre(q.nodes_per_panel, breaks[p], breaks[p + 1]);
    const QuadratureRule half = gauss_legendre(q.nodes_per_panel / 2, breaks[p], breaks[p + 1]);
    for (std::size_t i = 0; i < full.nodes.size(); ++i) add(full.nodes[i], full.weights[i], true);
    for (std::size_t i = 0; i < half.nodes.size(); ++i) add(half.nodes[i], half.weights[i], false);
  }
  return rule;
}

void check_common(const Spectrum& s, const State& z, const CylindricalFunction& f, const State& x,
                  const char* where) {
  s.check_state(z.view(), where);
  s.check_state(x.view(), where);
  f.check_indices(s.modes(), where);
  if (f.arity() > kMaxActive) throw std::invalid_argument(std::string(where) + ": too many active modes");
}

void check_samples(std::size_t n, const char* where) {
  if (n == 0) throw std::invalid_argument(std::string(where) + ": need at least one sample");
}

double active_weight(const Node& nd, const std::array<double, kMaxActive>& h,
                     const std::array<double, kMaxActive>& xi, std::size_t n) {
  double w = 0.0;
  for (std::size_t j = 0; j < n; ++j) w += nd.ell[j] * h[j] * xi[j];
  return w;
}

ResolventEstimate finish(const std::vector<MCEstimate>& est, double tail) {
  ResolventEstimate out;
  out.mc = est[0];
  // Rounding floor keeps the estimate meaningful when both rules agree exactly.
  out.quad_error = std::abs(est[0].value - est[1].value) + 1e-13 * std::abs(est[0].value);
  out.tail_bound = tail;
  return out;
}

}  // namespace

MCEstimate ou_eval(const Spectrum& s, const State& z, double t, const CylindricalFunction& f,
                   const State& x, std::size_t n_samples, const RngStream& rng) {
  check_common(s, z, f, x, "ou_eval");
  check_samples(n_samples, "ou_eval");
  if (t < 0.0) throw std::invalid_argument("ou_eval: t must be >= 0");
  if (t == 0.0) return {f(x), 0.0, n_samples};
  const std::size_t n = f.arity();
  const Node nd = make_node(s, z, x, f.indices(), t);
  return monte_carlo(n_samples, rng, 1, [&](RngStream& r, std::span<double> out) {
    std::array<double, kMaxActive> y{};
    for (std::size_t j = 0; j < n; ++j) y[j] = nd.mean[j] + nd.sd[j] * r.normal();
    out[0] = f.local(std::span<const double>(y.data(), n));
  })[0];
}

MCEstimate ou_derivative(const Spectrum& s, const State& z, double t, const CylindricalFunction& f,
                         const State& x, const State& h, std::size_t n_samples,
                         const RngStream& rng) {
  check_common(s, z, f, x, "ou_derivative");
  s.check_state(h.view(), "ou_derivative");
  check_samples(n_samples, "ou_derivative");
  if (!(t > 0.0)) throw std::invalid_argument("ou_derivative: t must be > 0");
  const std::size_t n = f.arity();
  const Node nd = make_node(s, z, x, f.indices(), t);
  std::array<double, kMaxActive> hh{};
  for (std::size_t j = 0; j < n; ++j) hh[j] = h[f.indices()[j]];
  return monte_carlo(n_samples, rng, 1, [&](RngStream& r, std::span<double> out) {
    std::array<double, kMaxActive> xi{}, yp{}, ym{};
    for (std::size_t j = 0; j < n; ++j) {
      xi[j] = r.normal();
      yp[j] = nd.mean[j] + nd.sd[j] * xi[j];
      ym[j] = nd.mean[j] - nd.sd[j] * xi[j];
    }
    const double diff = 0.5 * (f.local(std::span<const double>(yp.data(), n)) -
                               f.local(std::span<const double>(ym.data(), n)));
    out[0] = diff * active_weight(nd, hh, xi, n);
  })[0];
}

MCEstimate ou_finite_difference(const Spectrum& s, const State& z, double t,
                                const CylindricalFunction& f, const State& x, const State& h,
                                double eps, std::size_t n_samples, const RngStream& rng) {
  check_common(s, z, f, x, "ou_finite_difference");
  s.check_state(h.view(), "ou_finite_difference");
  check_samples(n_samples, "ou_finite_difference");
  if (!(eps > 0.0)) throw std::invalid_argument("ou_finite_difference: eps must be > 0");
  if (t < 0.0) throw std::invalid_argument("ou_finite_difference: t must be >= 0");
  State xp = x, xm = x;
  for (std::size_t k = 0; k < s.modes(); ++k) {
    xp[k] += eps * h[k];
    xm[k] -= eps * h[k];
  }
  const std::size_t n = f.arity();
  const Node np = make_node(s, z, xp, f.indices(), t);
  const Node nm = make_node(s, z, xm, f.indices(), t);
  return monte_carlo(n_samples, rng, 1, [&](RngStream& r, std::span<double> out) {
    std::array<double, kMaxActive> yp{}, ym{};
    for (std::size_t j = 0; j < n; ++j) {
      const double xi = r.normal();
      yp[j] = np.mean[j] + np.sd[j] * xi;
      ym[j] = nm.mean[j] + nm.sd[j] * xi;
    }
    out[0] = (f.local(std::span<const double>(yp.data(), n)) -
              f.local(std::span<const double>(ym.data(), n))) / (2.0 * eps);
  })[0];
}

ResolventEstimate resolvent_eval(const Spectrum& s, const State& z, double lambda,
                                 const CylindricalFunction& f, const State& x,
                                 std::size_t n_samples, const RngStream& rng,
                                 const QuadratureSpec& quad) {
  check_common(s, z, f, x, "resolvent_eval");
  check_samples(n_samples, "resolvent_eval");
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_eval: lambda must be > 0");
  const std::size_t n = f.arity();
  const TimeRule rule = time_rule(s, z, x, f.indices(), lambda, quad, 2.0);
  const auto est = monte_carlo(n_samples, rng, 2, [&](RngStream& r, std::span<double> out) {
    std::array<double, kMaxActive> xi{}, y{};
    for (std::size_t j = 0; j < n; ++j) xi[j] = r.normal();
    double full = 0.0, half = 0.0;
    for (const Node& nd : rule.nodes) {
      for (std::size_t j = 0; j < n; ++j) y[j] = nd.mean[j] + nd.sd[j] * xi[j];
      const double v = f.local(std::span<const double>(y.data(), n));
      full += nd.w_full * v;
      half += nd.w_half * v;
    }
    out[0] = full;
    out[1] = half;
  });
  const double sup = f.meta().sup_norm.value_or(std::numeric_limits<double>::infinity());
  return finish(est, sup * std::exp(-lambda * rule.t_max) / lambda);
}

ResolventEstimate resolvent_gradient(const Spectrum& s, const State& z, double lambda,
                                     const CylindricalFunction& f, const State& x, const State& h,
                                     std::size_t n_samples, const RngStream& rng,
                                     const QuadratureSpec& quad, std::optional<double> theta) {
  check_common(s, z, f, x, "resolvent_gradient");
  s.check_state(h.view(), "resolvent_gradient");
  check_samples(n_samples, "resolvent_gradient");
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_gradient: lambda must be > 0");
  const double th = theta.value_or(f.meta().holder_exponent);
  if (!(th > 0.0 && th <= 1.0)) throw std::invalid_argument("resolvent_gradient: theta must be in (0, 1]");
  const std::size_t n = f.arity();
  std::array<double, kMaxActive> hh{};
  for (std::size_t j = 0; j < n; ++j) hh[j] = h[f.indices()[j]];
  const TimeRule rule = time_rule(s, z, x, f.indices(), lambda, quad, 2.0 / th);
  const auto est = monte_carlo(n_samples, rng, 2, [&](RngStream& r, std::span<double> out) {
    std::array<double, kMaxActive> xi{}, yp{}, ym{};
    for (std::size_t j = 0; j < n; ++j) xi[j] = r.normal();
    double full = 0.0, half = 0.0;
    for (const Node& nd : rule.nodes) {
      for (std::size_t j = 0; j < n; ++j) {
        yp[j] = nd.mean[j] + nd.sd[j] * xi[j];
        ym[j] = nd.mean[j] - nd.sd[j] * xi[j];
      }
      const double v = 0.5 *
                       (f.local(std::span<const double>(yp.data(), n)) -
                        f.local(std::span<const double>(ym.data(), n))) *
                       active_weight(nd, hh, xi, n);
      full += nd.w_full * v;
      half += nd.w_half * v;
    }
    out[0] = full;
    out[1] = half;
  });
  // |D_h P_t f| <= |f|_0 |Lambda_t h| and Lambda_t is decreasing in t.
  double lam_h = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = f.indices()[j];
    const double l = lambda_op_coeff(s.lambda(k), s.noise(k), rule.t_max) * hh[j];
    lam_h += l * l;
  }
  const double sup = f.meta().sup_norm.value_or(std::numeric_limits<double>::infinity());
  const double tail = lam_h == 0.0 ? 0.0 : sup * std::sqrt(lam_h) * std::exp(-lambda * rule.t_max) / lambda;
  return finish(est, tail);
}

ResolventEstimate sqrtA_gradient_of_resolvent(const Spectrum& s, const State& z, double lambda,
                                              const CylindricalFunction& f, const State& x,
                                              const State& l, std::size_t n_samples,
                                              const RngStream& rng, const QuadratureSpec& quad,
                                              std::optional<double> theta) {
  s.check_state(l.view(), "sqrtA_gradient_of_resolvent");
  return resolvent_gradient(s, z, lambda, f, x, frac_power_apply(s, 0.5, l), n_samples, rng, quad,
                            theta);
}

namespace {

// Generator on the active coordinates y with drift coefficients b_j = lambda^{1/2} F_j.
double generator_local(const Spectrum& s, const CylindricalFunction& f, std::span<const double> y,
                       std::span<const double> b) {
  const std::size_t n = f.arity();
  std::array<double, kMaxActive> g{};
  std::array<double, kMaxActive * kMaxActive> hs{};
  f.local_gradient(y, std::span<double>(g.data(), n));
  f.local_hessian(y, std::span<double>(hs.data(), n * n));
  double out = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = f.indices()[j];
    out += 0.5 * s.noise(k) * hs[j * n + j];
    out += (-s.lambda(k) * y[j] + b[j]) * g[j];
  }
  return out;
}

}  // namespace

double generator_apply(const Spectrum& s, const DriftSpec& F, const CylindricalFunction& f,
                       std::span<const double> x) {
  s.check_state(x, "generator_apply");
  f.check_indices(s.modes(), "generator_apply");
  const std::size_t n = f.arity();
  std::array<double, kMaxActive> y{}, b{};
  for (std::size_t j = 0; j < n; ++j) y[j] = x[f.indices()[j]];
  if (!F.is_zero() && n > 0) {
    std::vector<double> fx(s.modes());
    F.apply(s, x, fx);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = f.indices()[j];
      b[j] = std::sqrt(s.lambda(k)) * fx[k];
    }
  }
  return generator_local(s, f, std::span<const double>(y.data(), n), std::span<const double>(b.data(), n));
}

double generator_apply(const Spectrum& s, const DriftSpec& F, const CylindricalFunction& f,
                       const State& x) {
  return generator_apply(s, F, f, x.view());
}

ResolventEstimate resolvent_identity_residual(const Spectrum& s, const State& z, double lambda,
                                              const CylindricalFunction& f, const State& x,
                                              std::size_t n_samples, const RngStream& rng,
                                              const QuadratureSpec& quad) {
  check_common(s, z, f, x, "resolvent_identity_residual");
  check_samples(n_samples, "resolvent_identity_residual");
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_identity_residual: lambda must be > 0");
  const std::size_t n = f.arity();
  std::array<double, kMaxActive> b{};
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = f.indices()[j];
    b[j] = std::sqrt(s.lambda(k)) * z[k];
  }
  const double fx = f(x);
  const TimeRule rule = time_rule(s, z, x, f.indices(), lambda, quad, 2.0);
  const auto est = monte_carlo(n_samples, rng, 2, [&](RngStream& r, std::span<double> out) {
    std::array<double, kMaxActive> xi{}, y{};
    for (std::size_t j = 0; j < n; ++j) xi[j] = r.normal();
    double full = 0.0, half = 0.0;
    for (const Node& nd : rule.nodes) {
      for (std::size_t j = 0; j < n; ++j) y[j] = nd.mean[j] + nd.sd[j] * xi[j];
      std::span<const double> yv(y.data(), n);
      const double v = lambda * f.local(yv) - generator_local(s, f, yv, std::span<const double>(b.data(), n));
      full += nd.w_full * v;
      half += nd.w_half * v;
    }
    out[0] = full - fx;
    out[1] = half - fx;
  });
  // Tail of R(Lf) integrates by parts to at most 2 |f|_0 e^{-lambda T}.
  const double sup = f.meta().sup_norm.value_or(std::numeric_limits<double>::infinity());
  return finish(est, 3.0 * sup * std::exp(-lambda * rule.t_max));
}

HolderNormEstimate holder_norm_estimate(const CylindricalFunction& f, double theta,
                                        const GaussianSampler& sampler, std::size_t pairs,
                                        const RngStream& rng) {
  if (pairs == 0) throw std::invalid_argument("holder_norm_estimate: need at least one pair");
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("holder_norm_estimate: theta must be in (0, 1]");
  f.check_indices(sampler.dim(), "holder_norm_estimate");
  RngStream r = rng;
  std::vector<double> a(sampler.dim()), b(sampler.dim());
  HolderNormEstimate out;
  for (std::size_t i = 0; i < pairs; ++i) {
    sampler.draw(r, a);
    sampler.draw(r, b);
    const double fa = f(a), fb = f(b);
    out.sup_estimate = std::max({out.sup_estimate, std::abs(fa), std::abs(fb)});
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
    if (d2 > 0.0)
      out.seminorm_lower_bound = std::max(out.seminorm_lower_bound, std::abs(fa - fb) / std::pow(d2, 0.5 * theta));
  }
  return out;
}

RegularityReport verify_regularity_scaling(const Spectrum& s, const State& z,
                                           const std::vector<CylindricalFunction>& family,
                                           double theta, const std::vector<double>& lambdas,
                                           const std::vector<State>& x_probes,
                                           const std::vector<State>& l_probes,
                                           std::size_t n_samples, const RngStream& rng,
                                           const QuadratureSpec& quad) {
  if (lambdas.size() < 4) throw std::invalid_argument("verify_regularity_scaling: need at least 4 lambda values");
  if (!std::is_sorted(lambdas.begin(), lambdas.end()) ||
      std::adjacent_find(lambdas.begin(), lambdas.end()) != lambdas.end())
    throw std::invalid_argument("verify_regularity_scaling: lambda grid must be strictly increasing");
  if (family.empty() || x_probes.empty() || l_probes.empty())
    throw std::invalid_argument("verify_regularity_scaling: empty family or probe set");
  RegularityReport rep;
  for (double lam : lambdas) {
    RegularityRow row;
    row.lambda = lam;
    for (std::size_t fi = 0; fi < family.size(); ++fi) {
      const CylindricalFunction& f = family[fi];
      for (std::size_t li = 0; li < l_probes.size(); ++li) {
        bool touches = false;
        for (std::size_t k : f.indices()) touches = touches || l_probes[li][k] != 0.0;
        if (!touches) continue;  // the gradient is exactly zero
        for (std::size_t xi = 0; xi < x_probes.size(); ++xi) {
          const ResolventEstimate e =
              sqrtA_gradient_of_resolvent(s, z, lam, f, x_probes[xi], l_probes[li], n_samples, rng, quad, theta);
          if (std::abs(e.mc.value) > row.max_abs) {
            row.max_abs = std::abs(e.mc.value);
            row.std_error = e.mc.std_error;
            row.argmax_function = fi;
            row.argmax_x = xi;
            row.argmax_l = li;
          }
        }
      }
    }
    row.scaled = std::pow(lam, 0.5 * theta) * row.max_abs;
    rep.rows.push_back(row);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rep.rows) {
    lo = std::min(lo, r.scaled);
    hi = std::max(hi, r.scaled);
  }
  rep.scaled_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  rep.strictly_decreasing = true;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i];
    const auto& b = rep.rows[i + 1];
    const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    if (!(a.max_abs - b.max_abs > 3.0 * se)) rep.strictly_decreasing = false;
  }
  return rep;
}

std::vector<ContractionRow> contraction_check(const Spectrum& s, const State& z,
                                              const DriftSpec& F, const CylindricalFunction& g,
                                              double theta, const std::vector<double>& lambdas,
                                              const std::vector<State>& probes,
                                              std::size_t n_samples, const RngStream& rng,
                                              const QuadratureSpec& quad) {
  if (probes.empty()) throw std::invalid_argument("contraction_check: need probe points");
  g.check_indices(s.modes(), "contraction_check");
  double g_norm;
  if (auto hn = g.holder_norm()) {
    g_norm = *hn;
  } else {
    const HolderNormEstimate e = holder_norm_estimate(g, theta, invariant_measure_sampler(s), 10000, rng.child(7));
    g_norm = e.sup_estimate + e.seminorm_lower_bound;
  }
  std::vector<State> drift_gap;
  for (const State& x : probes) {
    State fx = F(s, x);
    for (std::size_t k = 0; k < s.modes(); ++k) fx[k] -= z[k];
    drift_gap.push_back(std::move(fx));
  }
  std::vector<ContractionRow> rows;
  for (double lam : lambdas) {
    std::vector<double> phi(probes.size(), 0.0);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      for (std::size_t k : g.indices()) {
        if (drift_gap[p][k] == 0.0) continue;
        const ResolventEstimate e = sqrtA_gradient_of_resolvent(
            s, z, lam, g, probes[p], State::unit(s.modes(), k), n_samples, rng, quad, theta);
        phi[p] += drift_gap[p][k] * e.mc.value;
      }
    }
    ContractionRow row;
    row.lambda = lam;
    row.g_norm = g_norm;
    for (double v : phi) row.phi_sup = std::max(row.phi_sup, std::abs(v));
    for (std::size_t p = 0; p + 1 < probes.size(); p += 2) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < s.modes(); ++k) {
        const double d = probes[p][k] - probes[p + 1][k];
        d2 += d * d;
      }
      if (d2 > 0.0)
        row.phi_seminorm = std::max(row.phi_seminorm, std::abs(phi[p] - phi[p + 1]) / std::pow(d2, 0.5 * theta));
    }
    row.ratio = g_norm > 0.0 ? (row.phi_sup + row.phi_seminorm) / g_norm : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cspde
