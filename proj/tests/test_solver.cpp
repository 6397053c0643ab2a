#include <doctest.h>

#include <cmath>
#include <string>

#include "cspde/parallel.hpp"
#include "cspde/solver.hpp"

using namespace cspde;

namespace {

std::string what_of(const SolverConfig& c) {
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("solver config validation names the field") {
  SolverConfig c;
  c.dt = -1.0;
  CHECK(what_of(c).find("solver.dt") != std::string::npos);
  c = {};
  c.save_stride = 3;
  CHECK(what_of(c).find("solver.save_stride") != std::string::npos);
  c = {};
  c.horizon = 0.00105;
  CHECK(what_of(c).find("solver.T") != std::string::npos);
  c = {};
  c.record_noise = true;
  c.save_stride = 10;
  CHECK(what_of(c).find("solver.record_noise") != std::string::npos);
  c = {};
  c.stop_radius = -1.0;
  CHECK(what_of(c).find("solver.stop_radius") != std::string::npos);
  c = {};
  c.save_stride = 10;
  CHECK(c.n_steps() == 1000);
  CHECK(c.n_saved() == 101);
}

TEST_CASE("exponential euler is exact for a constant drift") {
  const Spectrum s = make_custom_spectrum({1.0, 9.0}, {1.0, 1.0});
  const State z(std::vector<double>{0.7, -1.2});
  const DriftSpec F = DriftSpec::constant(z);
  const State x(std::vector<double>{0.5, 2.0});
  const double dt = 0.2;
  State out(2);
  step_deterministic(s, F, x.view(), dt, out.view());
  // dx = (-lambda x + sqrt(lambda) z) dt with a fine classical RK4
  for (std::size_t k = 0; k < 2; ++k) {
    const double lam = s.lambda(k);
    auto f = [&](double v) { return -lam * v + std::sqrt(lam) * z[k]; };
    double v = x[k];
    const int n = 4000;
    const double h = dt / n;
    for (int i = 0; i < n; ++i) {
      const double k1 = f(v), k2 = f(v + 0.5 * h * k1), k3 = f(v + 0.5 * h * k2), k4 = f(v + h * k3);
      v += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    CHECK(out[k] == doctest::Approx(v).epsilon(1e-12));
  }
  const State y = step(s, F, x, dt);
  CHECK(y[0] == out[0]);
}

TEST_CASE("zero increments give the deterministic flow") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 3, 0);
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.horizon = 1.0;
  const State x0(std::vector<double>{1.0, 1.0, 1.0});
  const std::vector<double> eta(cfg.n_steps() * 3, 0.0);
  const PathSample p = simulate_path_from_increments(s, DriftSpec::zero(), x0, cfg, eta);
  REQUIRE(p.size() == 11);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(p.state(10)[k] == doctest::Approx(std::exp(-s.lambda(k))).epsilon(1e-12));
}

TEST_CASE("paths freeze at the exit radius") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 3, 0);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.horizon = 0.1;
  cfg.stop_radius = 1.0;
  RngStream rng(1, 0);
  const PathSample start_out = simulate_path(s, DriftSpec::zero(), State::unit(3, 0, 2.0), cfg, rng);
  CHECK(start_out.exited);
  CHECK(*start_out.exit_time == 0.0);
  CHECK(start_out.state(10)[0] == 2.0);

  cfg.stop_radius = 0.3;
  RngStream r2(1, 1);
  const PathSample p = simulate_path(s, DriftSpec::zero(), State(3), cfg, r2);
  if (p.exited) {
    const std::size_t i = static_cast<std::size_t>(std::llround(*p.exit_time / cfg.dt));
    CHECK(p.norm(i) >= 0.3);
    for (std::size_t j = i; j < p.size(); ++j) CHECK(p.state(j)[1] == p.state(i)[1]);
  }
}

TEST_CASE("blow-up marks the path as failed") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 2, 0);
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.horizon = 3.0;
  RngStream rng(2, 0);
  const DriftSpec F = DriftSpec::nonlocal(ScalarFunction::square(50.0));
  const PathSample p = simulate_path(s, F, State::unit(2, 0, 5.0), cfg, rng);
  CHECK(p.failed);
  CHECK(std::isnan(p.state(p.size() - 1)[0]));
}

TEST_CASE("streamed statistics agree with the stored ensemble") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 4, 0);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.horizon = 0.5;
  cfg.save_stride = 2;
  const DriftSpec F = DriftSpec::burgers(ScalarFunction::tanh());
  const State x0 = State::unit(4, 0, 0.5);
  const auto ens = simulate_ensemble(s, F, x0, cfg, 3000, 17);
  const auto table = moment_table(ens, 2.0);
  set_worker_count(1);
  const EnsembleStats a = ensemble_statistics(s, F, x0, cfg, 3000, 17);
  set_worker_count(8);
  const EnsembleStats b = ensemble_statistics(s, F, x0, cfg, 3000, 17);
  set_worker_count(0);
  REQUIRE(a.times.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(a.rows[i].estimate(4).value == doctest::Approx(table[i].estimate.value).epsilon(1e-12));
    CHECK(a.rows[i].mean == b.rows[i].mean);
    CHECK(a.rows[i].m2 == b.rows[i].m2);
  }
  CHECK(count_failed(ens) == 0);
}

TEST_CASE("ensemble mean under a constant drift") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 3, 0);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.horizon = 1.0;
  const State z(std::vector<double>{1.0, -0.5, 0.25});
  const State x0(std::vector<double>{0.3, 0.2, 0.1});
  const EnsembleStats st = ensemble_statistics(s, DriftSpec::constant(z), x0, cfg, 20000, 5);
  const State expect = gamma_shift(s, 1.0, z);
  const State decay = semigroup_apply(s, 1.0, x0);
  for (std::size_t k = 0; k < 3; ++k) {
    const MCEstimate e = st.rows.back().estimate(k);
    CHECK(std::abs(e.value - expect[k] - decay[k]) <= 4.0 * e.std_error);
  }
}
