#include <doctest.h>

#include <cmath>
#include <vector>

#include "cspde/uniqueness.hpp"

using namespace cspde;

TEST_CASE("weighted ks distance by hand") {
  const std::vector<double> a{0.0, 1.0, 2.0}, b{1.5, 2.5};
  CHECK(weighted_ks_distance(a, {}, b, {}) == doctest::Approx(2.0 / 3.0));
  const std::vector<double> wa{1.0, 1.0, 2.0};
  // weighted cdf of a: 0.25, 0.5, 1 ; b: 0.5 at 1.5
  CHECK(weighted_ks_distance(a, wa, b, {}) == doctest::Approx(0.5));
  CHECK(weighted_ks_distance(a, {}, a, {}) == 0.0);
}

TEST_CASE("effective sample size") {
  const std::vector<double> w{1.0, 1.0, 1.0, 1.0};
  CHECK(effective_sample_size(w) == doctest::Approx(4.0));
  const std::vector<double> v{1.0, 0.0, 0.0, 0.0};
  CHECK(effective_sample_size(v) == doctest::Approx(1.0));
}

TEST_CASE("permutation test p-value and threshold") {
  std::vector<double> a, b;
  RngStream r(1, 0);
  for (int i = 0; i < 200; ++i) {
    a.push_back(r.normal());
    b.push_back(r.normal() + 2.0);
  }
  const ComparisonResult far = weak_uniqueness_compare({a, b, {}, {}}, RngStream(1, 1), 199, 0.01);
  CHECK_FALSE(far.pass);
  CHECK(far.p_value == doctest::Approx(1.0 / 200.0));
  CHECK(far.ks_distance > far.threshold);
  std::vector<double> c;
  for (int i = 0; i < 200; ++i) c.push_back(r.normal());
  const ComparisonResult same = weak_uniqueness_compare({a, c, {}, {}}, RngStream(1, 2), 199, 0.01);
  CHECK(same.p_value > 0.0);
  CHECK(same.p_value <= 1.0);
  CHECK(same.ess_a == doctest::Approx(200.0));
  const std::vector<double> flat(50, 1.0);
  CHECK_THROWS(weak_uniqueness_compare({flat, flat, {}, {}}, RngStream(1, 3)));
}

TEST_CASE("girsanov weight is 1 for a zero change of drift") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 3, 0);
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.horizon = 1.0;
  cfg.record_noise = true;
  RngStream rng(2, 0);
  const PathSample p = simulate_path(s, DriftSpec::zero(), State(3), cfg, rng);
  CHECK(girsanov_log_weight(p, DriftSpec::zero(), s) == 0.0);
  // constant change of drift: closed form from the recorded increments
  const State z(std::vector<double>{0.5, 0.0, 0.0});
  double dwsum = 0.0;
  for (std::size_t i = 0; i < cfg.n_steps(); ++i) dwsum += p.increment(i)[0];
  const double expect = 0.5 * dwsum - 0.5 * 0.25 * 1.0;
  CHECK(girsanov_log_weight(p, DriftSpec::constant(z), s) == doctest::Approx(expect));
  cfg.record_noise = false;
  RngStream r2(2, 0);
  const PathSample q = simulate_path(s, DriftSpec::zero(), State(3), cfg, r2);
  CHECK_THROWS(girsanov_weight(q, DriftSpec::constant(z), s));
}

TEST_CASE("martingale residuals for the drift-free process") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 2, 0);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.horizon = 1.0;
  cfg.save_stride = 5;
  const auto ens = simulate_ensemble(s, DriftSpec::zero(), State(2), cfg, 4000, 3);
  const MartingaleTest t{cyl_square(0), 0.5, 1.0, {{0.25, cyl_cos(1)}}};
  const MCEstimate e = martingale_residual(ens, t, s, DriftSpec::zero());
  CHECK(std::abs(e.value) <= 4.0 * e.std_error + 5.0 * cfg.dt);
  const MCEstimate qv = quadratic_variation_residual(ens, s, DriftSpec::zero(), 0, 0.5, 1.0);
  CHECK(std::abs(qv.value) <= 4.0 * qv.std_error + 5.0 * cfg.dt);
  CHECK(grid_index(ens[0], 0.5, "test") == 10);
  CHECK_THROWS(grid_index(ens[0], 0.503, "test"));
  CHECK_THROWS(stopped_martingale_residual(ens, 2.0, t, s, DriftSpec::zero()));
}

TEST_CASE("exponential moment probe at T = 0 is 1") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 2, 0);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.horizon = 0.1;
  const auto ens = simulate_ensemble(s, DriftSpec::zero(), State(2), cfg, 100, 1);
  const ExpMomentResult r = exp_moment_probe(ens, s, 0.0);
  CHECK(r.estimate.value == doctest::Approx(1.0));
  const ExpMomentResult q = exp_moment_probe(ens, s, 0.1);
  CHECK(q.estimate.value > 1.0);
  CHECK(q.used == 100);
}

TEST_CASE("quadratic variation of a stopped path uses the stopped clock") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 2, 0);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.horizon = 1.0;
  cfg.save_stride = 5;
  cfg.stop_radius = 0.6;
  const auto ens = simulate_ensemble(s, DriftSpec::zero(), State(2), cfg, 6000, 23);
  std::size_t exited = 0;
  for (const auto& p : ens) exited += p.exited;
  CHECK(exited > 1000);
  const MCEstimate qv = quadratic_variation_residual(ens, s, DriftSpec::zero(), 0, 0.2, 1.0);
  CHECK(std::abs(qv.value) <= 4.0 * qv.std_error + 5.0 * cfg.dt);
}
