#include <doctest.h>

#include <cmath>

#include "cspde/cylindrical.hpp"
#include "cspde/kolmogorov.hpp"

using namespace cspde;

namespace {

// one mode with lambda = q = 1
Spectrum one_mode() { return make_custom_spectrum({1.0}, {1.0}); }

}  // namespace

TEST_CASE("catalogue functions and derivatives") {
  const auto f = cyl_sin_cos(0, 1);
  const double y[2] = {0.4, -0.3};
  CHECK(f.local(y) == doctest::Approx(std::sin(0.4) * std::cos(-0.3)));
  double g[2], h[4];
  f.local_gradient(y, g);
  CHECK(g[1] == doctest::Approx(-std::sin(0.4) * std::sin(-0.3)));
  f.local_hessian(y, h);
  CHECK(h[1] == doctest::Approx(-std::cos(0.4) * std::sin(-0.3)));
  CHECK(h[1] == h[2]);
  const auto k = cyl_kink(2, 0.5);
  CHECK(k(State::unit(4, 2, -0.25)) == doctest::Approx(-0.5));
  CHECK(*k.holder_norm() == doctest::Approx(1.0 + std::sqrt(2.0)));
  CHECK_THROWS(k.check_indices(2, "test"));
  CHECK_THROWS(catalogue_function("unknown"));
  // user kernel without derivatives falls back to differences
  CylindricalFunction u("cube", {0}, [](std::span<const double> v) { return v[0] * v[0] * v[0]; });
  const double p[1] = {0.5};
  double d[1], dd[1];
  u.local_gradient(p, d);
  u.local_hessian(p, dd);
  CHECK(d[0] == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(dd[0] == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("invariant measure sampler") {
  const Spectrum s = make_custom_spectrum({1.0, 4.0}, {1.0, 2.0});
  const GaussianSampler g = invariant_measure_sampler(s);
  RngStream r(1, 0);
  double acc = 0.0;
  for (int i = 0; i < 40000; ++i) {
    const State x = g.draw(r);
    acc += x[1] * x[1];
  }
  CHECK(acc / 40000 == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("ou_eval of cos in closed form") {
  const Spectrum s = one_mode();
  const auto f = cyl_cos(0);
  const State x(std::vector<double>{0.7});
  for (double zv : {0.0, 1.0}) {
    const State z(std::vector<double>{zv});
    for (double t : {0.1, 1.0}) {
      const double mean = std::exp(-t) * 0.7 + (1.0 - std::exp(-t)) * zv;
      const double var = qt_variance(1.0, 1.0, t);
      const double exact = std::cos(mean) * std::exp(-0.5 * var);
      const MCEstimate e = ou_eval(s, z, t, f, x, 50000, RngStream(4, 1));
      CHECK(std::abs(e.value - exact) <= 4.0 * e.std_error);
      const MCEstimate d = ou_derivative(s, z, t, f, x, State(std::vector<double>{1.0}), 50000, RngStream(4, 2));
      const double dexact = -std::sin(mean) * std::exp(-0.5 * var) * std::exp(-t);
      CHECK(std::abs(d.value - dexact) <= 4.0 * d.std_error);
    }
  }
  const MCEstimate at0 = ou_eval(s, State(1), 0.0, f, x, 10, RngStream(1, 1));
  CHECK(at0.value == std::cos(0.7));
  CHECK(at0.std_error == 0.0);
}

TEST_CASE("finite differences with common random numbers") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 3, 0);
  const auto f = cyl_gaussian(0);
  const State x = State::unit(3, 0, 0.4);
  const State h = State::unit(3, 0);
  const MCEstimate a = ou_finite_difference(s, State(3), 0.5, f, x, h, 1e-3, 20000, RngStream(8, 0));
  const MCEstimate b = ou_derivative(s, State(3), 0.5, f, x, h, 20000, RngStream(8, 1));
  CHECK(std::abs(a.value - b.value) <= 4.0 * combined_se(a, b) + 1e-4);
}

TEST_CASE("resolvent of cos against a 1-d quadrature oracle") {
  const Spectrum s = one_mode();
  const auto f = cyl_cos(0);
  const State x(std::vector<double>{0.3});
  // adaptive quadrature of the closed-form integrand, frozen
  struct Case {
    double lambda, z, value;
  } cases[] = {{2.0, 0.0, 0.432082934704273},
               {2.0, 1.0, 0.378590621380971},
               {8.0, 0.0, 0.11470948705381},
               {8.0, 1.0, 0.110480605172647}};
  for (const auto& c : cases) {
    const ResolventEstimate r =
        resolvent_eval(s, State(std::vector<double>{c.z}), c.lambda, f, x, 20000, RngStream(2, 0));
    CHECK(std::abs(r.mc.value - c.value) <= r.budget(4.0));
    CHECK(r.quad_error < 1e-6);
    CHECK(r.tail_bound < 1e-12);
  }
  const ResolventEstimate g = resolvent_gradient(s, State(1), 2.0, f, x, State(std::vector<double>{1.0}), 20000,
                                                 RngStream(2, 1));
  CHECK(std::abs(g.mc.value - -0.0684189105138802) <= g.budget(4.0));
  const ResolventEstimate g8 = resolvent_gradient(s, State(std::vector<double>{1.0}), 8.0, f, x,
                                                  State(std::vector<double>{1.0}), 20000, RngStream(2, 2));
  CHECK(std::abs(g8.mc.value - -0.0381115694257821) <= g8.budget(4.0));
}

TEST_CASE("generator of cos on one mode") {
  const Spectrum s = one_mode();
  const auto f = cyl_cos(0);
  const State x(std::vector<double>{0.6});
  const double z = 0.8;
  const double expect = -0.5 * std::cos(0.6) + 0.6 * std::sin(0.6) - z * std::sin(0.6);
  CHECK(generator_apply(s, DriftSpec::constant(State(std::vector<double>{z})), f, x) == doctest::Approx(expect));
}

TEST_CASE("resolvent identity residual is within budget") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 4, 0);
  const auto f = cyl_sin_cos(0, 1);
  const State x(std::vector<double>{0.3, -0.2, 0.0, 0.0});
  const ResolventEstimate r = resolvent_identity_residual(s, State::unit(4, 0), 2.0, f, x, 20000, RngStream(6, 0));
  CHECK(std::abs(r.mc.value) <= r.budget(4.0));
}

TEST_CASE("holder estimates stay below the declared norms") {
  const Spectrum s = one_mode();
  const GaussianSampler g = invariant_measure_sampler(s);
  const HolderNormEstimate e = holder_norm_estimate(cyl_cos(0), 1.0, g, 2000, RngStream(1, 3));
  CHECK(e.sup_estimate <= 1.0);
  CHECK(e.sup_estimate > 0.9);
  CHECK(e.seminorm_lower_bound <= 1.0);
  CHECK(e.seminorm_lower_bound > 0.5);
  const HolderNormEstimate k = holder_norm_estimate(cyl_kink(0, 0.5), 0.5, g, 2000, RngStream(1, 4));
  CHECK(k.seminorm_lower_bound <= std::sqrt(2.0));
}

TEST_CASE("regularity sweep preconditions and a small run") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 2, 0);
  std::vector<CylindricalFunction> fam{cyl_kink(0, 0.5), cyl_kink(1, 0.5)};
  std::vector<State> xs{State(2)};
  std::vector<State> ls{State::unit(2, 0), State::unit(2, 1)};
  CHECK_THROWS(verify_regularity_scaling(s, State(2), fam, 0.5, {1.0, 4.0, 16.0}, xs, ls, 100, RngStream(1, 0)));
  CHECK_THROWS(verify_regularity_scaling(s, State(2), fam, 0.5, {1.0, 4.0, 2.0, 16.0}, xs, ls, 100, RngStream(1, 0)));
  const auto rep = verify_regularity_scaling(s, State(2), fam, 0.5, {1.0, 4.0, 16.0, 64.0}, xs, ls, 4000, RngStream(1, 0));
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].max_abs > rep.rows[3].max_abs);
  CHECK(rep.scaled_ratio >= 1.0);
  CHECK(rep.rows[2].scaled == doctest::Approx(std::sqrt(std::sqrt(16.0)) * rep.rows[2].max_abs));
}

TEST_CASE("contraction rows") {
  const Spectrum s = make_spectrum(Model::Burgers1D, 3, 0);
  const GaussianSampler g = invariant_measure_sampler(s);
  RngStream r(3, 0);
  std::vector<State> probes{g.draw(r), g.draw(r), g.draw(r)};
  const auto rows = contraction_check(s, State(3), DriftSpec::burgers(ScalarFunction::tanh()), cyl_kink(0, 0.5), 0.5,
                                      {4.0, 64.0}, probes, 2000, RngStream(3, 1));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].phi_sup < rows[0].phi_sup);
  CHECK(rows[0].g_norm == doctest::Approx(1.0 + std::sqrt(2.0)));
}
