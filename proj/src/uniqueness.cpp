#include "cspde/uniqueness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cspde/kolmogorov.hpp"

namespace cspde {

namespace {

struct Urbg {
  using result_type = std::uint64_t;
  RngStream& r;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return r.bits(); }
};

void check_test(const PathSample& path, const MartingaleTest& test, const char* where) {
  if (!(test.s < test.t)) throw std::invalid_argument(std::string(where) + ": need s < t");
  for (const Marker& mk : test.markers)
    if (mk.time > test.s) throw std::invalid_argument(std::string(where) + ": marker time after s");
  grid_index(path, test.s, where);
  grid_index(path, test.t, where);
  for (const Marker& mk : test.markers) grid_index(path, mk.time, where);
}

double marker_product(const PathSample& path, const MartingaleTest& test) {
  double prod = 1.0;
  for (const Marker& mk : test.markers) prod *= mk.h(path.state(grid_index(path, mk.time, "marker")));
  return prod;
}

// Trapezoid integral of g(row) over rows [i0, i1].
template <class G>
double trapezoid(const PathSample& path, std::size_t i0, std::size_t i1, G&& g) {
  double acc = 0.0;
  if (i1 <= i0) return 0.0;
  double prev = g(i0);
  for (std::size_t i = i0 + 1; i <= i1; ++i) {
    const double cur = g(i);
    acc += 0.5 * (prev + cur) * (path.times[i] - path.times[i - 1]);
    prev = cur;
  }
  return acc;
}

MCEstimate residual_impl(std::span<const PathSample> ensemble, const MartingaleTest& test,
                         const Spectrum& s, const DriftSpec& F, bool stopped, const char* where) {
  if (ensemble.empty()) throw std::invalid_argument(std::string(where) + ": empty ensemble");
  test.f.check_indices(s.modes(), where);
  check_test(ensemble.front(), test, where);
  SampleSums acc(1);
  for (const PathSample& path : ensemble) {
    if (path.failed) continue;
    const std::size_t is = grid_index(path, test.s, where);
    std::size_t it = grid_index(path, test.t, where);
    const double df = test.f(path.state(it)) - test.f(path.state(is));
    if (stopped && path.exited) it = std::min(it, grid_index(path, *path.exit_time, where));
    const double integral = trapezoid(path, is, it, [&](std::size_t i) {
      return generator_apply(s, F, test.f, path.state(i));
    });
    const double v = (df - integral) * marker_product(path, test);
    acc.add(std::span<const double>(&v, 1));
  }
  if (acc.n == 0) throw std::invalid_argument(std::string(where) + ": every path failed");
  return acc.estimate(0);
}

}  // namespace

std::size_t grid_index(const PathSample& path, double time, const char* where) {
  if (path.times.empty()) throw std::invalid_argument(std::string(where) + ": empty path");
  const double tol = 1e-9 * std::max(1.0, path.times.back());
  auto it = std::lower_bound(path.times.begin(), path.times.end(), time - tol);
  if (it == path.times.end() || std::abs(*it - time) > tol)
    throw std::invalid_argument(std::string(where) + ": time " + std::to_string(time) +
                                " is not on the saved grid");
  return static_cast<std::size_t>(it - path.times.begin());
}

MCEstimate martingale_residual(std::span<const PathSample> ensemble, const MartingaleTest& test,
                               const Spectrum& s, const DriftSpec& F) {
  return residual_impl(ensemble, test, s, F, false, "martingale_residual");
}

MCEstimate stopped_martingale_residual(std::span<const PathSample> ensemble, double n,
                                       const MartingaleTest& test, const Spectrum& s,
                                       const DriftSpec& F_n) {
  const bool finite = std::isfinite(n);
  for (const PathSample& path : ensemble) {
    const bool match = finite ? (path.stop_radius && std::abs(*path.stop_radius - n) <= 1e-12 * n)
                              : !path.stop_radius.has_value();
    if (!match)
      throw std::invalid_argument("stopped_martingale_residual: ensemble stop radius does not match n");
  }
  return residual_impl(ensemble, test, s, F_n, true, "stopped_martingale_residual");
}

MCEstimate quadratic_variation_residual(std::span<const PathSample> ensemble, const Spectrum& s,
                                        const DriftSpec& F, std::size_t k, std::size_t j,
                                        double s_time, double t_time) {
  const char* where = "quadratic_variation_residual";
  if (ensemble.empty()) throw std::invalid_argument(std::string(where) + ": empty ensemble");
  if (k >= s.modes() || j >= s.modes()) throw std::invalid_argument(std::string(where) + ": mode out of range");
  if (s_time > t_time) throw std::invalid_argument(std::string(where) + ": need s <= t");
  SampleSums acc(1);
  std::vector<double> fbuf(s.modes());
  for (const PathSample& path : ensemble) {
    if (path.failed) continue;
    const std::size_t is = grid_index(path, s_time, where);
    const std::size_t it = grid_index(path, t_time, where);
    // stopped paths: everything ends at the exit row
    std::size_t stop = it;
    if (path.exited && path.exit_time) stop = std::min(it, grid_index(path, *path.exit_time, where));
    // Drift columns for modes k and j on rows [0, it].
    std::vector<double> fk(it + 1, 0.0), fj(it + 1, 0.0);
    if (!F.is_zero()) {
      for (std::size_t i = 0; i <= it; ++i) {
        F.apply(s, path.state(i), fbuf);
        fk[i] = fbuf[k];
        fj[i] = fbuf[j];
      }
    }
    auto martingale = [&](std::size_t mode, const std::vector<double>& fcol, std::size_t row) {
      const double lam = s.lambda(mode);
      const double sq = std::sqrt(lam);
      const double integral = trapezoid(path, 0, row, [&](std::size_t i) {
        return lam * path.state(i)[mode] - sq * fcol[i];
      });
      return path.state(row)[mode] - path.state(0)[mode] + integral;
    };
    const std::size_t rt = std::min(it, stop), rs = std::min(is, stop);
    const double mt = martingale(k, fk, rt) * martingale(j, fj, rt);
    const double ms = martingale(k, fk, rs) * martingale(j, fj, rs);
    const double comp = k == j ? s.noise(k) * (path.times[rt] - path.times[rs]) : 0.0;
    const double v = mt - ms - comp;
    acc.add(std::span<const double>(&v, 1));
  }
  if (acc.n == 0) throw std::invalid_argument(std::string(where) + ": every path failed");
  return acc.estimate(0);
}

double girsanov_log_weight(const PathSample& path, const DriftSpec& B, const Spectrum& s) {
  if (path.noise.empty()) throw std::invalid_argument("girsanov_weight: path has no recorded noise");
  if (path.failed) throw std::invalid_argument("girsanov_weight: failed path");
  if (B.is_zero()) return 0.0;
  const std::size_t m = s.modes();
  const std::size_t steps = path.noise.size() / m;
  if (path.size() != steps + 1) throw std::invalid_argument("girsanov_weight: noise and states do not align");
  std::vector<double> b(m);
  double log_w = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    B.apply(s, path.state(i), b);
    const auto dw = path.increment(i);
    const double dt = path.times[i + 1] - path.times[i];
    for (std::size_t k = 0; k < m; ++k) {
      const double d = std::sqrt(s.lambda(k)) * b[k];
      log_w += d * dw[k] / s.noise(k) - 0.5 * d * d * dt / s.noise(k);
    }
  }
  return log_w;
}

double girsanov_weight(const PathSample& path, const DriftSpec& B, const Spectrum& s) {
  return std::exp(girsanov_log_weight(path, B, s));
}

double effective_sample_size(std::span<const double> w) {
  double s1 = 0.0, s2 = 0.0;
  for (double v : w) {
    s1 += v;
    s2 += v * v;
  }
  return s2 > 0.0 ? s1 * s1 / s2 : 0.0;
}

namespace {

struct Pooled {
  std::vector<double> values;  // sorted
  std::vector<double> weights;
};

// Labels true = sample a. Distance of the weighted ECDFs over sorted pooled data.
double ks_sorted(const Pooled& p, const std::vector<char>& label_a) {
  double wa = 0.0, wb = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) (label_a[i] ? wa : wb) += p.weights[i];
  double ca = 0.0, cb = 0.0, d = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    (label_a[i] ? ca : cb) += p.weights[i];
    if (i + 1 == p.values.size() || p.values[i + 1] != p.values[i])
      d = std::max(d, std::abs(ca / wa - cb / wb));
  }
  return d;
}

std::vector<double> unit_weights_if_empty(const std::vector<double>& w, std::size_t n, const char* which) {
  if (w.empty()) return std::vector<double>(n, 1.0);
  if (w.size() != n) throw std::invalid_argument(std::string("weak_uniqueness_compare: ") + which + " weight count mismatch");
  for (double v : w)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("weak_uniqueness_compare: weights must be positive and finite");
  return w;
}

}  // namespace

double weighted_ks_distance(std::span<const double> a, std::span<const double> wa,
                            std::span<const double> b, std::span<const double> wb) {
  const auto ua = unit_weights_if_empty(std::vector<double>(wa.begin(), wa.end()), a.size(), "a");
  const auto ub = unit_weights_if_empty(std::vector<double>(wb.begin(), wb.end()), b.size(), "b");
  wa = ua;
  wb = ub;
  std::vector<std::size_t> order(a.size() + b.size());
  std::iota(order.begin(), order.end(), 0);
  auto value = [&](std::size_t i) { return i < a.size() ? a[i] : b[i - a.size()]; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return value(x) < value(y); });
  Pooled p;
  std::vector<char> label(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t i = order[r];
    p.values.push_back(value(i));
    p.weights.push_back(i < a.size() ? wa[i] : wb[i - a.size()]);
    label[r] = i < a.size();
  }
  return ks_sorted(p, label);
}

ComparisonResult weak_uniqueness_compare(const LawComparison& comp, const RngStream& rng,
                                         std::size_t shuffles, double alpha) {
  if (comp.a.empty() || comp.b.empty()) throw std::invalid_argument("weak_uniqueness_compare: empty sample");
  if (shuffles == 0) throw std::invalid_argument("weak_uniqueness_compare: need shuffles > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("weak_uniqueness_compare: alpha must be in (0, 1)");
  const auto wa = unit_weights_if_empty(comp.weights_a, comp.a.size(), "a");
  const auto wb = unit_weights_if_empty(comp.weights_b, comp.b.size(), "b");
  for (double v : comp.a)
    if (!std::isfinite(v)) throw std::invalid_argument("weak_uniqueness_compare: non-finite value");
  for (double v : comp.b)
    if (!std::isfinite(v)) throw std::invalid_argument("weak_uniqueness_compare: non-finite value");
  const double first = comp.a.front();
  const bool constant = std::all_of(comp.a.begin(), comp.a.end(), [&](double v) { return v == first; }) &&
                        std::all_of(comp.b.begin(), comp.b.end(), [&](double v) { return v == first; });
  if (constant) throw std::invalid_argument("weak_uniqueness_compare: degenerate (constant) functional");

  const std::size_t na = comp.a.size();
  std::vector<std::size_t> order(na + comp.b.size());
  std::iota(order.begin(), order.end(), 0);
  auto value = [&](std::size_t i) { return i < na ? comp.a[i] : comp.b[i - na]; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return value(x) < value(y); });
  Pooled p;
  std::vector<char> label(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t i = order[r];
    p.values.push_back(value(i));
    p.weights.push_back(i < na ? wa[i] : wb[i - na]);
    label[r] = i < na;
  }
  ComparisonResult res;
  res.ks_distance = ks_sorted(p, label);
  res.ess_a = effective_sample_size(wa);
  res.ess_b = effective_sample_size(wb);

  RngStream r = rng;
  Urbg g{r};
  std::vector<double> null(shuffles);
  std::vector<char> perm = label;
  std::size_t exceed = 0;
  for (std::size_t b = 0; b < shuffles; ++b) {
    std::shuffle(perm.begin(), perm.end(), g);
    null[b] = ks_sorted(p, perm);
    if (null[b] >= res.ks_distance - 1e-12) ++exceed;
  }
  std::sort(null.begin(), null.end());
  const auto q = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(shuffles + 1)));
  res.threshold = null[std::min(q, shuffles) - 1];
  res.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + shuffles);
  res.pass = res.p_value > alpha;
  return res;
}

ExpMomentResult exp_moment_probe(std::span<const PathSample> ensemble, const Spectrum& s, double T) {
  if (ensemble.empty()) throw std::invalid_argument("exp_moment_probe: empty ensemble");
  const std::size_t m = s.modes();
  std::vector<double> root(m);
  for (std::size_t k = 0; k < m; ++k) root[k] = std::sqrt(s.lambda(k));
  std::vector<double> samples;
  samples.reserve(ensemble.size());
  for (const PathSample& path : ensemble) {
    if (path.failed) continue;
    const std::size_t iT = T == 0.0 ? 0 : grid_index(path, T, "exp_moment_probe");
    const double integral = trapezoid(path, 0, iT, [&](std::size_t i) {
      const auto y = path.state(i);
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += root[k] * y[k] * y[k];
      return acc;
    });
    samples.push_back(std::exp(0.5 * integral));
  }
  ExpMomentResult out;
  out.used = samples.size();
  if (samples.empty()) throw std::invalid_argument("exp_moment_probe: every path failed");
  SampleSums acc(1);
  double sum = 0.0, top = 0.0;
  for (double v : samples) {
    acc.add(std::span<const double>(&v, 1));
    sum += v;
    top = std::max(top, v);
  }
  out.estimate = acc.estimate(0);
  out.max_share = top / sum;
  out.ess = effective_sample_size(samples);
  out.heavy_tail = out.max_share > 0.2;
  return out;
}

}  // namespace cspde
