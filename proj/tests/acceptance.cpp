// Acceptance run: one line per criterion, nonzero exit if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cspde/config.hpp"
#include "cspde/cylindrical.hpp"
#include "cspde/experiments.hpp"
#include "cspde/kolmogorov.hpp"
#include "cspde/numerics.hpp"
#include "cspde/parallel.hpp"

using namespace cspde;

namespace {

// pinned tolerances and time limits (seconds)
constexpr double kSeFactor = 3.0;
constexpr double kResolventOracleTol = 1e-3;
constexpr std::size_t kResolventOracleSamples = 400000;
constexpr double kRegularitySpread = 3.0;
constexpr double kMartingaleBias = 5.0;  // times dt
constexpr double kCalibrationMaxRate = 0.02;
constexpr double kNegativeControlMinRate = 0.99;
constexpr double kLimit[10] = {0, 10, 1, 60, 120, 300, 300, 60, 600, 0};

struct Line {
  bool pass = true;
  std::string note;
  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      note += (note.empty() ? "" : "; ") + why;
    }
  }
};

std::string num(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

ExperimentConfig cfg(const std::string& file) { return load_config(std::string(CSPDE_CONFIG_DIR) + "/" + file); }

struct Timed {
  ExperimentResult result;
  double seconds = 0.0;
};

Timed timed_run(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed t;
  t.result = run_experiment(c);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

double column_max(const Table& t, const std::function<double(std::size_t)>& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) m = std::max(m, f(i));
  return m;
}

Line criterion1() {
  Line l;
  const ExperimentConfig c = cfg("accept_01_convolution.cfg");
  const Timed r = timed_run(c);
  const Table& t = r.result.table("modes.csv");
  const double tol = kSeFactor * std::sqrt(2.0 / static_cast<double>(c.mc.N));
  double worst = 0.0;
  std::size_t checked = 0, bad = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double time = t.at(i, "time");
    if (std::abs(time - 0.1) > 1e-9 && std::abs(time - 1.0) > 1e-9) continue;
    const double rel = std::abs(t.at(i, "variance") - t.at(i, "exact_variance")) / t.at(i, "exact_variance");
    worst = std::max(worst, rel / tol);
    ++checked;
    if (rel > tol) ++bad;
  }
  l.require(checked == 64, "expected 64 mode checks, got " + std::to_string(checked));
  l.require(bad == 0, std::to_string(bad) + " of " + std::to_string(checked) + " modes outside tolerance");
  l.require(r.seconds < kLimit[1], "runtime " + num(r.seconds) + " s");
  l.note = "max rel/tol " + num(worst) + ", " + num(r.seconds) + " s" + (l.note.empty() ? "" : "; " + l.note);
  return l;
}

Line criterion2() {
  Line l;
  const Timed r = timed_run(cfg("accept_02_bounds.cfg"));
  const Table& b = r.result.table("bounds.csv");
  const Table& s = r.result.table("smoothing.csv");
  l.require(b.rows.size() == 40, "expected 40 time points");
  l.require(std::abs(lambda_kernel_constant() - 1.0) < 1e-12, "C1 != 1");
  l.require(std::abs(sqrt_lambda_kernel_constant() - 0.569) < 5e-4, "c2 not near 0.569");
  for (std::size_t i = 0; i < b.rows.size(); ++i) {
    l.require(b.at(i, "lambda_norm") <= b.at(i, "c1_bound"), "C1 bound violated at t = " + num(b.at(i, "t")));
    l.require(b.at(i, "sqrtA_lambda_norm") <= b.at(i, "c2_bound"), "c2 bound violated at t = " + num(b.at(i, "t")));
    l.require(s.at(i, "smoothing_norm") <= s.at(i, "smoothing_bound"), "smoothing bound violated");
  }
  l.require(b.at(0, "t") == 1e-4 || std::abs(b.at(0, "t") - 1e-4) < 1e-16, "grid start");
  l.require(std::abs(b.at(39, "t") - 10.0) < 1e-12, "grid end");
  l.require(r.seconds < kLimit[2], "runtime " + num(r.seconds) + " s");
  l.note = "c2 = " + num(sqrt_lambda_kernel_constant()) + ", " + num(r.seconds) + " s" + (l.note.empty() ? "" : "; " + l.note);
  return l;
}

Line criterion3() {
  Line l;
  const ExperimentConfig c = cfg("accept_03_bismut.cfg");
  const Timed r = timed_run(c);
  const Table& t = r.result.table("bismut.csv");
  l.require(t.rows.size() == 5 * 10 * 2 * 2, "expected 200 cases");
  l.require(c.mc.N >= 100000, "N below 1e5");
  std::size_t bad = 0;
  const double worst = column_max(t, [&](std::size_t i) {
    const double bound = kSeFactor * std::hypot(t.at(i, "bismut_stderr"), t.at(i, "fd_stderr")) + 1e-4;
    const double d = std::abs(t.at(i, "bismut") - t.at(i, "fd"));
    if (d > bound) ++bad;
    return d / bound;
  });
  l.require(bad == 0, std::to_string(bad) + " cases outside 3 SE + 1e-4");
  l.require(r.seconds < kLimit[3], "runtime " + num(r.seconds) + " s");
  l.note = "max |diff|/bound " + num(worst) + ", " + num(r.seconds) + " s" + (l.note.empty() ? "" : "; " + l.note);
  return l;
}

// 1-d oracle: the active mode has lambda = q = 1 and the Gaussian expectation is closed form
double oracle_integrand(const std::string& f, double lam, double x, double z, double t) {
  const double a = std::exp(-t);
  const double mu = a * x + (1.0 - a) * z;
  const double var = 0.5 * (1.0 - a * a);
  double v = 0.0;
  if (f == "cos") v = std::cos(mu) * std::exp(-0.5 * var);
  else v = std::exp(-mu * mu / (1.0 + 2.0 * var)) / std::sqrt(1.0 + 2.0 * var);
  return std::exp(-lam * t) * v;
}

double oracle_resolvent(const std::string& f, double lam, double x, double z) {
  // t = u^2 / (1 - u)^2 maps [0, 1) onto [0, inf); composite Simpson
  const int n = 200000;
  auto g = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double t = u * u / ((1.0 - u) * (1.0 - u));
    const double dt = 2.0 * u / ((1.0 - u) * (1.0 - u) * (1.0 - u));
    return oracle_integrand(f, lam, x, z, t) * dt;
  };
  double s = g(0.0) + g(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(static_cast<double>(i) / n);
  return s / (3.0 * n);
}

Line criterion4() {
  Line l;
  const ExperimentConfig c = cfg("accept_04_resolvent.cfg");
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult r = run_experiment(c);
  const Table& t = r.table("resolvent.csv");
  l.require(t.rows.size() == 3 * 2 * 2, "expected 12 cases");
  std::size_t bad = 0;
  double worst = column_max(t, [&](std::size_t i) {
    const double bound = kSeFactor * (t.at(i, "residual_stderr") + t.at(i, "residual_quad_error") + t.at(i, "residual_tail"));
    if (std::abs(t.at(i, "residual")) > bound) ++bad;
    return std::abs(t.at(i, "residual")) / bound;
  });
  l.require(bad == 0, std::to_string(bad) + " residuals outside 3 (SE + quadrature + tail)");

  // single-mode cross-check against the 1-d oracle
  const Spectrum s = build_spectrum(c);
  const std::vector<double> xv = c.reals("x");
  const State x = padded_state(xv, s.modes(), "experiment.x");
  double oracle_gap = 0.0;
  std::uint64_t id = 1000;
  for (const std::string f : {"cos", "gaussian"}) {
    const CylindricalFunction fn = catalogue_function(f, 0);
    for (double lam : c.reals("lambdas"))
      for (double zs : c.reals("z_scales")) {
        const ResolventEstimate e = resolvent_eval(s, State::unit(s.modes(), 0, zs), lam, fn, x,
                                                   kResolventOracleSamples, RngStream(c.mc.seed, id++));
        const double gap = std::abs(e.mc.value - oracle_resolvent(f, lam, xv[0], zs));
        oracle_gap = std::max(oracle_gap, gap);
        l.require(gap <= kResolventOracleTol, f + " lambda " + num(lam) + " z " + num(zs) + " off oracle by " + num(gap));
      }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  l.require(secs < kLimit[4], "runtime " + num(secs) + " s");
  l.note = "max |residual|/bound " + num(worst) + ", max oracle gap " + num(oracle_gap) + ", " + num(secs) + " s" +
           (l.note.empty() ? "" : "; " + l.note);
  return l;
}

Line criterion5() {
  Line l;
  const ExperimentConfig c = cfg("accept_05_regularity.cfg");
  const Timed r = timed_run(c);
  const Table& t = r.result.table("regularity.csv");
  l.require(t.rows.size() == 4, "expected 4 lambdas");
  l.require(c.real("theta") == 0.5, "theta must be 1/2");
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double scaled = std::pow(t.at(i, "lambda"), 0.25) * t.at(i, "max_abs");
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    if (i > 0) {
      const double drop = t.at(i - 1, "max_abs") - t.at(i, "max_abs");
      const double se = std::hypot(t.at(i - 1, "stderr"), t.at(i, "stderr"));
      l.require(drop > kSeFactor * se, "max not decreasing beyond 3 SE at lambda " + num(t.at(i, "lambda")));
    }
  }
  l.require(hi / lo < kRegularitySpread, "scaled spread " + num(hi / lo));
  l.require(r.seconds < kLimit[5], "runtime " + num(r.seconds) + " s");
  l.note = "scaled spread " + num(hi / lo) + ", " + num(r.seconds) + " s" + (l.note.empty() ? "" : "; " + l.note);
  return l;
}

Line criterion6() {
  Line l;
  double secs = 0.0, worst = 0.0;
  for (const char* file : {"accept_06_martingale_zero.cfg", "accept_06_martingale_nonlocal.cfg"}) {
    const ExperimentConfig c = cfg(file);
    l.require(c.mc.N >= 10000 && c.solver.dt == 1e-3 && c.solver.T == 1.0, std::string(file) + ": N, dt or T differ");
    const Timed r = timed_run(c);
    secs += r.seconds;
    const Table& t = r.result.table("martingale.csv");
    l.require(t.rows.size() >= 8, std::string(file) + ": battery incomplete");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const double bound = kSeFactor * t.at(i, "stderr") + kMartingaleBias * c.solver.dt;
      worst = std::max(worst, std::abs(t.at(i, "estimate")) / bound);
      l.require(std::abs(t.at(i, "estimate")) <= bound, std::string(file) + ": " + t.labels[i]);
    }
  }
  l.require(secs < kLimit[6], "runtime " + num(secs) + " s");
  l.note = "max |residual|/bound " + num(worst) + ", " + num(secs) + " s" + (l.note.empty() ? "" : "; " + l.note);
  return l;
}

Line criterion7() {
  Line l;
  const ExperimentConfig c = cfg("accept_07_closure.cfg");
  l.require(c.mc.N >= 10000, "N below 1e4");
  const Timed r = timed_run(c);
  const Table& t = r.result.table("closure.csv");
  bool saw_weight = false;
  double worst = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double bound = kSeFactor * std::hypot(t.at(i, "reweighted_stderr"), t.at(i, "reference_stderr"));
    worst = std::max(worst, std::abs(t.at(i, "diff")) / bound);
    l.require(std::abs(t.at(i, "reweighted") - t.at(i, "reference")) <= bound, t.labels[i]);
    if (t.labels[i] == "mean_weight") saw_weight = true;
  }
  l.require(saw_weight, "mean weight row missing");
  l.require(t.rows.size() >= 4, "expected weight row and three functions");
  l.require(r.seconds < kLimit[7], "runtime " + num(r.seconds) + " s");
  l.note = "max |diff|/bound " + num(worst) + ", " + num(r.seconds) + " s" + (l.note.empty() ? "" : "; " + l.note);
  return l;
}

double rejection_rate(const Table& meta, double alpha) {
  std::size_t rej = 0;
  for (std::size_t i = 0; i < meta.rows.size(); ++i)
    if (meta.at(i, "p_value") <= alpha) ++rej;
  return static_cast<double>(rej) / static_cast<double>(meta.rows.size());
}

Line criterion8() {
  Line l;
  const ExperimentConfig cal = cfg("accept_08_calibration.cfg");
  const ExperimentConfig neg = cfg("accept_08_sign_flip.cfg");
  l.require(cal.integer("meta_reps") >= 200, "calibration needs 200 meta-reps");
  l.require(cal.real("alpha") == 0.01 && neg.real("alpha") == 0.01, "test level must be 0.01");
  const Timed a = timed_run(cal);
  const Timed b = timed_run(neg);
  const double ra = rejection_rate(a.result.table("meta.csv"), 0.01);
  const double rb = rejection_rate(b.result.table("meta.csv"), 0.01);
  l.require(ra <= kCalibrationMaxRate, "calibration rejects " + num(ra));
  l.require(rb >= kNegativeControlMinRate, "negative control rejects only " + num(rb));
  l.require(a.result.exit_code() == 0, "calibration run did not pass");
  l.require(b.result.exit_code() == 1, "negative control run should report failure");
  const double secs = a.seconds + b.seconds;
  l.require(secs < kLimit[8], "runtime " + num(secs) + " s");
  l.note = "calibration " + num(ra) + ", negative control " + num(rb) + ", " + num(secs) + " s" +
           (l.note.empty() ? "" : "; " + l.note);
  return l;
}

Line criterion9() {
  Line l;
  std::size_t files = 0;
  for (const char* file : {"accept_01_convolution.cfg", "accept_03_bismut.cfg", "accept_06_martingale_nonlocal.cfg",
                           "accept_07_closure.cfg", "determinism.cfg"}) {
    ExperimentConfig c = cfg(file);
    set_worker_count(1);
    const ExperimentResult a = run_experiment(c);
    set_worker_count(8);
    const ExperimentResult b = run_experiment(c);
    set_worker_count(0);
    for (const auto& t : a.tables) {
      ++files;
      l.require(format_csv(t, c.output.precision) == format_csv(b.table(t.file), c.output.precision),
                std::string(file) + ": " + t.file + " differs");
    }
    l.require(format_verdict(a) == format_verdict(b), std::string(file) + ": verdict differs");
  }
  l.note = std::to_string(files) + " CSV files compared" + (l.note.empty() ? "" : "; " + l.note);
  return l;
}

}  // namespace

int main() {
  const std::vector<std::function<Line()>> checks{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                  criterion6, criterion7, criterion8, criterion9};
  bool all = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Line l;
    try {
      l = checks[i]();
    } catch (const std::exception& e) {
      l.pass = false;
      l.note = std::string("error: ") + e.what();
    }
    all = all && l.pass;
    std::printf("criterion %zu: %s  %s\n", i + 1, l.pass ? "PASS" : "FAIL", l.note.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
