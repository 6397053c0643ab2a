#include "cspde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cspde {

namespace {

constexpr std::uint64_t kAuxNoiseStream = 0x6e6f697365ULL;

bool finite_all(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double span_norm(std::span<const double> v) {
  double r2 = 0.0;
  for (double x : v) r2 += x * x;
  return std::sqrt(r2);
}

struct StepTables {
  std::vector<double> decay;
  std::vector<double> drift_gain;  // (1 - e^{-lambda dt}) lambda^{-1/2}
};

StepTables step_tables(const Spectrum& s, double dt) {
  StepTables t;
  t.decay.resize(s.modes());
  t.drift_gain.resize(s.modes());
  for (std::size_t k = 0; k < s.modes(); ++k) {
    const double lam = s.lambda(k);
    t.decay[k] = std::exp(-lam * dt);
    t.drift_gain[k] = -std::expm1(-lam * dt) / std::sqrt(lam);
  }
  return t;
}

// Advances x in place by the deterministic part; returns false on a non-finite drift.
bool advance(const Spectrum& s, const DriftSpec& F, const StepTables& tab, std::span<double> x,
             std::span<double> fbuf) {
  if (F.is_zero()) {
    for (std::size_t k = 0; k < x.size(); ++k) x[k] *= tab.decay[k];
    return true;
  }
  try {
    F.apply(s, x, fbuf);
  } catch (const std::domain_error&) {
    return false;
  }
  if (!finite_all(fbuf)) return false;
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = tab.decay[k] * x[k] + tab.drift_gain[k] * fbuf[k];
  return true;
}

class PathRunner {
 public:
  PathRunner(const Spectrum& s, const DriftSpec& F, const State& x0, const SolverConfig& cfg)
      : s_(s), F_(F), cfg_(cfg), tab_(step_tables(s, cfg.dt)) {
    cfg.validate();
    s.check_state(x0.view(), "simulate_path");
    const std::size_t m = s.modes();
    path_.m = m;
    path_.step_dt = cfg.dt;
    const std::size_t rows = cfg.n_saved();
    path_.times.resize(rows);
    for (std::size_t i = 0; i < rows; ++i)
      path_.times[i] = static_cast<double>(i * cfg.save_stride) * cfg.dt;
    path_.times.back() = cfg.horizon;
    path_.states.assign(rows * m, 0.0);
    x_ = x0.coeffs;
    f_.assign(m, 0.0);
    if (cfg.record_noise) path_.noise.assign(cfg.n_steps() * m, 0.0);
    if (cfg.stop_radius && std::isfinite(*cfg.stop_radius)) radius_ = *cfg.stop_radius;
    path_.stop_radius = radius_;
  }

  // add_noise(i, x) adds the noise of step i to x.
  template <class AddNoise>
  PathSample run(AddNoise&& add_noise) {
    const std::size_t n = cfg_.n_steps();
    if (save(0)) return finish_frozen(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!advance(s_, F_, tab_, x_, f_)) return finish_failed((i / cfg_.save_stride) + 1);
      add_noise(i, std::span<double>(x_));
      if (!finite_all(x_)) return finish_failed((i / cfg_.save_stride) + 1);
      if ((i + 1) % cfg_.save_stride == 0) {
        const std::size_t row = (i + 1) / cfg_.save_stride;
        if (save(row)) return finish_frozen(row);
      }
    }
    return std::move(path_);
  }

  std::span<double> noise_row(std::size_t i) {
    return {path_.noise.data() + i * s_.modes(), s_.modes()};
  }

 private:
  // Stores the current state in `row`; true when the exit radius is reached.
  bool save(std::size_t row) {
    std::copy(x_.begin(), x_.end(), path_.states.begin() + row * s_.modes());
    if (radius_ && span_norm(x_) >= *radius_) {
      path_.exited = true;
      path_.exit_time = path_.times[row];
      return true;
    }
    return false;
  }

  PathSample finish_frozen(std::size_t row) {
    const std::size_t m = s_.modes();
    for (std::size_t r = row + 1; r < path_.times.size(); ++r)
      std::copy(x_.begin(), x_.end(), path_.states.begin() + r * m);
    return std::move(path_);
  }

  PathSample finish_failed(std::size_t row) {
    path_.failed = true;
    std::fill(path_.states.begin() + row * s_.modes(), path_.states.end(),
              std::numeric_limits<double>::quiet_NaN());
    return std::move(path_);
  }

  const Spectrum& s_;
  const DriftSpec& F_;
  const SolverConfig& cfg_;
  StepTables tab_;
  PathSample path_;
  std::vector<double> x_;
  std::vector<double> f_;
  std::optional<double> radius_;
};

}  // namespace

std::size_t SolverConfig::n_steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("solver.dt must be > 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("solver.T must be > 0");
  if (dt > horizon) throw std::invalid_argument("solver.dt must not exceed solver.T");
  if (save_stride == 0) throw std::invalid_argument("solver.save_stride must be >= 1");
  const std::size_t n = n_steps();
  if (std::abs(static_cast<double>(n) * dt - horizon) > 1e-9 * horizon)
    throw std::invalid_argument("solver.T must be an integer multiple of solver.dt");
  if (n % save_stride != 0)
    throw std::invalid_argument("solver.save_stride must divide the number of steps");
  if (stop_radius && !(*stop_radius > 0.0))
    throw std::invalid_argument("solver.stop_radius must be > 0");
  if (record_noise && save_stride != 1)
    throw std::invalid_argument("solver.record_noise requires solver.save_stride = 1");
}

double PathSample::norm(std::size_t i) const { return span_norm(state(i)); }

void step_deterministic(const Spectrum& s, const DriftSpec& F, std::span<const double> x, double dt,
                        std::span<double> out) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  s.check_state(x, "step");
  const StepTables tab = step_tables(s, dt);
  std::vector<double> f(s.modes());
  std::copy(x.begin(), x.end(), out.begin());
  if (!advance(s, F, tab, out, f)) throw std::domain_error("step: non-finite drift");
}

State step(const Spectrum& s, const DriftSpec& F, const State& x, double dt) {
  State out(s.modes());
  step_deterministic(s, F, x.view(), dt, out.view());
  return out;
}

State step(const Spectrum& s, const DriftSpec& F, const State& x, double dt, RngStream& rng) {
  State out = step(s, F, x, dt);
  ConvolutionKernel kernel(s, dt);
  std::vector<double> eta(s.modes());
  kernel.draw(rng, eta);
  for (std::size_t k = 0; k < s.modes(); ++k) out[k] += eta[k];
  return out;
}

PathSample simulate_path(const Spectrum& s, const DriftSpec& F, const State& x0,
                         const SolverConfig& cfg, RngStream& rng) {
  PathRunner runner(s, F, x0, cfg);
  const ConvolutionKernel kernel(s, cfg.dt);
  RngStream aux = rng.child(kAuxNoiseStream);
  std::vector<double> eta(s.modes());
  return runner.run([&](std::size_t i, std::span<double> x) {
    kernel.draw(rng, eta);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += eta[k];
    if (cfg.record_noise) kernel.wiener_from(eta, aux, runner.noise_row(i));
  });
}

PathSample simulate_path_from_increments(const Spectrum& s, const DriftSpec& F, const State& x0,
                                         const SolverConfig& cfg, std::span<const double> eta) {
  if (cfg.record_noise)
    throw std::invalid_argument("simulate_path_from_increments: record_noise is not supported");
  const std::size_t m = s.modes();
  if (eta.size() != cfg.n_steps() * m)
    throw std::invalid_argument("simulate_path_from_increments: expected n_steps x m increments");
  PathRunner runner(s, F, x0, cfg);
  return runner.run([&](std::size_t i, std::span<double> x) {
    for (std::size_t k = 0; k < m; ++k) x[k] += eta[i * m + k];
  });
}

std::vector<PathSample> simulate_ensemble(const Spectrum& s, const DriftSpec& F, const State& x0,
                                          const SolverConfig& cfg, std::size_t n_paths,
                                          std::uint64_t seed) {
  cfg.validate();
  s.check_state(x0.view(), "simulate_ensemble");
  std::vector<PathSample> out(n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    RngStream rng(seed, i);
    out[i] = simulate_path(s, F, x0, cfg, rng);
  });
  return out;
}

EnsembleStats ensemble_statistics(const Spectrum& s, const DriftSpec& F, const State& x0,
                                  const SolverConfig& cfg, std::size_t n_paths, std::uint64_t seed,
                                  double p) {
  cfg.validate();
  s.check_state(x0.view(), "ensemble_statistics");
  if (n_paths == 0) throw std::invalid_argument("ensemble_statistics: need at least one path");
  const std::size_t m = s.modes();
  const std::size_t rows = cfg.n_saved();
  const std::size_t blocks = (n_paths + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<EnsembleStats> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    EnsembleStats& st = partial[b];
    st.rows.assign(rows, SampleSums(m + 1));
    std::vector<double> v(m + 1);
    const std::size_t end = std::min(n_paths, (b + 1) * kMonteCarloBlock);
    for (std::size_t i = b * kMonteCarloBlock; i < end; ++i) {
      RngStream rng(seed, i);
      const PathSample path = simulate_path(s, F, x0, cfg, rng);
      if (path.failed) {
        ++st.failed;
        continue;
      }
      if (path.exited) ++st.exited;
      if (st.times.empty()) st.times = path.times;
      for (std::size_t r = 0; r < rows; ++r) {
        const auto x = path.state(r);
        std::copy(x.begin(), x.end(), v.begin());
        v[m] = std::pow(span_norm(x), p);
        st.rows[r].add(v);
      }
    }
  });
  EnsembleStats out;
  out.rows.assign(rows, SampleSums(m + 1));
  for (EnsembleStats& st : partial) {
    out.failed += st.failed;
    out.exited += st.exited;
    if (out.times.empty()) out.times = st.times;
    for (std::size_t r = 0; r < rows; ++r) out.rows[r].merge(st.rows[r]);
  }
  if (out.times.empty()) {
    out.times.resize(rows);
    for (std::size_t i = 0; i < rows; ++i)
      out.times[i] = static_cast<double>(i * cfg.save_stride) * cfg.dt;
  }
  return out;
}

std::vector<MomentRow> moment_table(std::span<const PathSample> ensemble, double p) {
  if (ensemble.empty()) throw std::invalid_argument("moment_table: empty ensemble");
  if (!(p > 0.0)) throw std::invalid_argument("moment_table: p must be > 0");
  const PathSample& first = ensemble.front();
  std::vector<MomentRow> rows;
  rows.reserve(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    SampleSums acc(1);
    for (const PathSample& path : ensemble) {
      if (path.failed) continue;
      if (path.size() != first.size())
        throw std::invalid_argument("moment_table: paths have different time grids");
      const double v = std::pow(path.norm(i), p);
      acc.add(std::span<const double>(&v, 1));
    }
    if (acc.n == 0) throw std::invalid_argument("moment_table: every path failed");
    rows.push_back({first.times[i], acc.estimate(0)});
  }
  return rows;
}

std::size_t count_failed(std::span<const PathSample> ensemble) {
  return static_cast<std::size_t>(
      std::count_if(ensemble.begin(), ensemble.end(), [](const PathSample& p) { return p.failed; }));
}

}  // namespace cspde
