#include "cspde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cspde/cylindrical.hpp"
#include "cspde/kolmogorov.hpp"
#include "cspde/numerics.hpp"
#include "cspde/solver.hpp"
#include "cspde/uniqueness.hpp"

namespace cspde {

namespace {

constexpr std::uint64_t kProbeStream = 1ULL << 40;

std::string fmt(double v, int precision = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

State z_state(const ExperimentConfig& c, const Spectrum& s) { return padded_state(c.drift.z, s.modes(), "drift.z"); }
State x0_state(const ExperimentConfig& c, const Spectrum& s) { return padded_state(c.solver.x0, s.modes(), "solver.x0"); }

QuadratureSpec quad_spec(const ExperimentConfig& c) {
  QuadratureSpec q;
  q.nodes_per_panel = static_cast<std::size_t>(c.integer("nodes_per_panel"));
  q.panels = static_cast<std::size_t>(c.integer("panels"));
  q.panel_ratio = c.real("panel_ratio");
  q.decay_span = c.real("decay_span");
  if (q.nodes_per_panel < 2) throw std::invalid_argument("experiment.nodes_per_panel: must be >= 2");
  if (!(q.panel_ratio < 1.0)) throw std::invalid_argument("experiment.panel_ratio: must be < 1");
  return q;
}

void need_modes(const Spectrum& s, std::size_t n, const std::string& what) {
  if (s.modes() < n)
    throw std::invalid_argument("model.m: " + what + " needs at least " + std::to_string(n) + " modes");
}

std::size_t arity_of(const std::string& name) { return name == "sin_cos" ? 2 : 1; }

State random_state(RngStream& r, std::size_t m, double scale) {
  State x(m);
  for (std::size_t k = 0; k < m; ++k) x[k] = scale * r.normal();
  return x;
}

// ---------------------------------------------------------------------------

ExperimentResult run_simulate(const ExperimentConfig& c) {
  const Spectrum s = build_spectrum(c);
  const DriftSpec F = build_drift(c, s);
  const SolverConfig cfg = build_solver(c);
  const State x0 = x0_state(c, s);
  const double p = c.real("moment_p");
  const std::size_t m = s.modes();
  const EnsembleStats st = ensemble_statistics(s, F, x0, cfg, c.mc.N, c.mc.seed, p);

  ExperimentResult r;
  Table moments{"moments.csv", {"time", "p", "estimate", "stderr"}};
  Table modes{"modes.csv", {"time", "mode", "mean", "mean_stderr", "variance", "exact_variance", "rel_error", "tolerance"}};
  for (std::size_t i = 0; i < st.times.size(); ++i) {
    const MCEstimate e = st.rows[i].estimate(m);
    moments.add({st.times[i], p, e.value, e.std_error});
    const double n = static_cast<double>(st.rows[i].n);
    for (std::size_t k = 0; k < m; ++k) {
      const MCEstimate mk = st.rows[i].estimate(k);
      const double var = st.rows[i].variance(k);
      const double exact = qt_variance(s.lambda(k), s.noise(k), st.times[i]);
      const double rel = exact > 0.0 ? std::abs(var - exact) / exact : std::abs(var);
      modes.add({st.times[i], static_cast<double>(k + 1), mk.value, mk.std_error, var, exact, rel,
                 3.0 * std::sqrt(2.0 / n)});
    }
  }
  r.tables.push_back(std::move(moments));
  r.tables.push_back(modes);

  if (c.flag("write_path")) {
    RngStream rng(c.mc.seed, 0);
    const PathSample path = simulate_path(s, F, x0, cfg, rng);
    Table t{"path.csv", {"time"}};
    for (std::size_t k = 0; k < m; ++k) t.columns.push_back("mode_" + std::to_string(k + 1));
    for (std::size_t i = 0; i < path.size(); ++i) {
      std::vector<double> row{path.times[i]};
      const auto x = path.state(i);
      row.insert(row.end(), x.begin(), x.end());
      t.add(row);
    }
    r.tables.push_back(std::move(t));
  }

  r.verdict.statistic = "failed_paths";
  r.verdict.value = static_cast<double>(st.failed);
  r.verdict.detail = std::to_string(st.failed) + " failed, " + std::to_string(st.exited) + " exited of " +
                     std::to_string(c.mc.N);
  if (c.flag("variance_check")) {
    if (!F.is_zero()) throw std::invalid_argument("experiment.variance_check: requires drift.kind = zero");
    std::vector<double> check = c.reals("check_times");
    double worst = 0.0;
    for (std::size_t row = 0; row < modes.rows.size(); ++row) {
      const double t = modes.at(row, "time");
      if (t == 0.0) continue;
      if (!check.empty() && std::none_of(check.begin(), check.end(),
                                         [&](double v) { return std::abs(v - t) <= 1e-9 * std::max(1.0, t); }))
        continue;
      worst = std::max(worst, modes.at(row, "rel_error") / modes.at(row, "tolerance"));
    }
    r.verdict.statistic = "max_rel_error_over_tolerance";
    r.verdict.value = worst;
    r.verdict.threshold = 1.0;
    r.verdict.pass = worst <= 1.0;
  }
  return r;
}

ExperimentResult run_ou_eval(const ExperimentConfig& c) {
  const Spectrum s = build_spectrum(c);
  const std::size_t m = s.modes();
  const auto names = c.words("functions");
  for (const auto& n : names) need_modes(s, arity_of(n), "function " + n);
  const auto times = c.reals("times");
  const auto zs = c.reals("z_scales");
  const auto n_probes = static_cast<std::size_t>(c.integer("probes"));
  const double eps = c.real("eps");
  const double slack = c.real("abs_tol");

  RngStream pr(c.mc.seed, kProbeStream);
  std::vector<State> xs, hs;
  for (std::size_t p = 0; p < n_probes; ++p) {
    xs.push_back(random_state(pr, m, c.real("probe_scale")));
    State h = random_state(pr, m, 1.0);
    const double nh = h.norm();
    for (double& v : h.coeffs) v /= nh;
    hs.push_back(std::move(h));
  }
  Table t{"bismut.csv", {"t", "z", "probe", "bismut", "bismut_stderr", "fd", "fd_stderr", "diff", "bound", "ok"}, "function"};
  std::uint64_t case_id = 0;
  double worst = 0.0;
  bool all_ok = true;
  for (const auto& name : names) {
    const CylindricalFunction f = catalogue_function(name, 0);
    for (double time : times) {
      for (double zs_ : zs) {
        const State z = State::unit(m, 0, zs_);
        for (std::size_t p = 0; p < n_probes; ++p) {
          const RngStream rng(c.mc.seed, case_id++);
          const MCEstimate b = ou_derivative(s, z, time, f, xs[p], hs[p], c.mc.N, rng);
          const MCEstimate d = ou_finite_difference(s, z, time, f, xs[p], hs[p], eps, c.mc.N, rng);
          const double diff = b.value - d.value;
          const double bound = 3.0 * combined_se(b, d) + slack;
          const bool ok = std::abs(diff) <= bound;
          all_ok = all_ok && ok;
          worst = std::max(worst, std::abs(diff) / bound);
          t.add({time, zs_, static_cast<double>(p + 1), b.value, b.std_error, d.value, d.std_error, diff,
                 bound, ok ? 1.0 : 0.0},
                name);
        }
      }
    }
  }
  ExperimentResult r;
  r.tables.push_back(std::move(t));
  r.verdict = {all_ok, "max_abs_diff_over_bound", worst, 1.0, std::to_string(case_id) + " cases"};
  return r;
}

ExperimentResult run_resolvent(const ExperimentConfig& c) {
  const Spectrum s = build_spectrum(c);
  const std::size_t m = s.modes();
  const auto names = c.words("functions");
  for (const auto& n : names) need_modes(s, arity_of(n), "function " + n);
  const QuadratureSpec q = quad_spec(c);
  const State x = padded_state(c.reals("x"), m, "experiment.x");
  Table t{"resolvent.csv",
          {"lambda", "z", "single_mode", "value", "value_stderr", "value_quad_error", "value_tail",
           "residual", "residual_stderr", "residual_quad_error", "residual_tail", "bound", "ok"},
          "function"};
  std::uint64_t case_id = 0;
  bool all_ok = true;
  double worst = 0.0;
  for (const auto& name : names) {
    const CylindricalFunction f = catalogue_function(name, 0);
    if (!f.meta().sup_norm) throw std::invalid_argument("experiment.functions: " + name + " is unbounded");
    for (double lam : c.reals("lambdas")) {
      for (double zs_ : c.reals("z_scales")) {
        const State z = State::unit(m, 0, zs_);
        const RngStream rng(c.mc.seed, case_id++);
        const ResolventEstimate v = resolvent_eval(s, z, lam, f, x, c.mc.N, rng, q);
        const ResolventEstimate e = resolvent_identity_residual(s, z, lam, f, x, c.mc.N, rng, q);
        const double bound = 3.0 * (e.mc.std_error + e.quad_error + e.tail_bound);
        const bool ok = std::abs(e.mc.value) <= bound;
        all_ok = all_ok && ok;
        worst = std::max(worst, std::abs(e.mc.value) / bound);
        t.add({lam, zs_, f.arity() == 1 ? 1.0 : 0.0, v.mc.value, v.mc.std_error, v.quad_error, v.tail_bound,
               e.mc.value, e.mc.std_error, e.quad_error, e.tail_bound, bound, ok ? 1.0 : 0.0},
              name);
      }
    }
  }
  ExperimentResult r;
  r.tables.push_back(std::move(t));
  r.verdict = {all_ok, "max_abs_residual_over_bound", worst, 1.0, std::to_string(case_id) + " cases"};
  return r;
}

ExperimentResult run_verify_bounds(const ExperimentConfig& c) {
  const Spectrum s = build_spectrum(c);
  const double c1 = lambda_kernel_constant();
  const double c2 = sqrt_lambda_kernel_constant();
  const double cs = smoothing_constant();
  const auto n = static_cast<std::size_t>(c.integer("points"));
  const double a = std::log(c.real("t_min")), b = std::log(c.real("t_max"));
  Table bounds{"bounds.csv", {"t", "lambda_norm", "c1_bound", "sqrtA_lambda_norm", "c2_bound"}};
  Table smooth{"smoothing.csv", {"t", "smoothing_norm", "smoothing_bound"}};
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? std::exp(a) : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    const auto ell = lambda_op_coeffs(s, t);
    double ln = 0.0, sq = 0.0, sm = 0.0;
    for (std::size_t k = 0; k < s.modes(); ++k) {
      const double root = std::sqrt(s.lambda(k));
      ln = std::max(ln, ell[k]);
      sq = std::max(sq, root * ell[k]);
      sm = std::max(sm, root * std::exp(-s.lambda(k) * t));
    }
    const double b1 = c1 / std::sqrt(t), b2 = c2 / t, bs = cs / std::sqrt(t);
    ok = ok && ln <= b1 && sq <= b2 && sm <= bs;
    worst = std::max({worst, ln / b1, sq / b2, sm / bs});
    bounds.add({t, ln, b1, sq, b2});
    smooth.add({t, sm, bs});
  }
  ExperimentResult r;
  r.tables.push_back(std::move(bounds));
  r.tables.push_back(std::move(smooth));
  r.verdict = {ok, "max_norm_over_bound", worst, 1.0,
               "C1 = " + fmt(c1, 12) + ", c2 = " + fmt(c2, 12) + ", smoothing = " + fmt(cs, 12)};
  return r;
}

ExperimentResult run_verify_regularity(const ExperimentConfig& c) {
  const Spectrum s = build_spectrum(c);
  const std::size_t m = s.modes();
  const auto modes = static_cast<std::size_t>(c.integer("family_modes"));
  need_modes(s, modes, "experiment.family_modes");
  const double theta = c.real("theta");
  std::vector<CylindricalFunction> family;
  std::vector<State> ls;
  for (std::size_t k = 0; k < modes; ++k) {
    family.push_back(cyl_kink(k, theta));
    ls.push_back(State::unit(m, k));
  }
  std::vector<State> xs{State(m)};
  RngStream pr(c.mc.seed, kProbeStream);
  for (std::int64_t i = 0; i < c.integer("random_probes"); ++i) xs.push_back(random_state(pr, m, c.real("probe_scale")));
  const RegularityReport rep = verify_regularity_scaling(s, z_state(c, s), family, theta, c.reals("lambdas"), xs, ls,
                                                         c.mc.N, RngStream(c.mc.seed, 0), quad_spec(c));
  Table t{"regularity.csv", {"lambda", "max_abs", "stderr", "scaled", "argmax_mode", "argmax_probe"}};
  for (const auto& row : rep.rows)
    t.add({row.lambda, row.max_abs, row.std_error, row.scaled, static_cast<double>(row.argmax_function + 1),
           static_cast<double>(row.argmax_x)});
  ExperimentResult r;
  r.tables.push_back(std::move(t));
  const double limit = c.real("max_ratio");
  r.verdict = {rep.scaled_ratio < limit && rep.strictly_decreasing, "scaled_ratio", rep.scaled_ratio, limit,
               rep.strictly_decreasing ? "max strictly decreasing" : "max not strictly decreasing"};
  return r;
}

ExperimentResult run_contraction(const ExperimentConfig& c) {
  const Spectrum s = build_spectrum(c);
  const std::size_t m = s.modes();
  const auto mode = static_cast<std::size_t>(c.integer("function_mode"));
  need_modes(s, mode + (c.text("function") == "sin_cos" ? 1 : 0), "experiment.function_mode");
  const double theta = c.real("theta");
  const CylindricalFunction g = catalogue_function(c.text("function"), mode - 1, theta);
  const GaussianSampler sampler = invariant_measure_sampler(s);
  RngStream pr(c.mc.seed, kProbeStream);
  std::vector<State> probes;
  for (std::int64_t i = 0; i < c.integer("probes"); ++i) probes.push_back(sampler.draw(pr));
  const auto rows = contraction_check(s, z_state(c, s), build_drift(c, s), g, theta, c.reals("lambdas"), probes,
                                      c.mc.N, RngStream(c.mc.seed, 0), quad_spec(c));
  Table t{"contraction.csv", {"lambda", "phi_sup", "phi_seminorm", "g_norm", "ratio"}};
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.add({rows[i].lambda, rows[i].phi_sup, rows[i].phi_seminorm, rows[i].g_norm, rows[i].ratio});
    if (i > 0 && !(rows[i].ratio < rows[i - 1].ratio)) decreasing = false;
  }
  (void)m;
  ExperimentResult r;
  r.tables.push_back(std::move(t));
  r.verdict = {true, "last_ratio", rows.empty() ? 0.0 : rows.back().ratio, 0.5,
               decreasing ? "ratio decreasing in lambda" : "ratio not monotone in lambda"};
  return r;
}

ExperimentResult run_martingale(const ExperimentConfig& c) {
  const Spectrum s = build_spectrum(c);
  need_modes(s, 2, "martingale-check");
  const DriftSpec F = build_drift(c, s);
  const SolverConfig cfg = build_solver(c);
  const auto ensemble = simulate_ensemble(s, F, x0_state(c, s), cfg, c.mc.N, c.mc.seed);
  const double ts = c.real("s_time"), tt = c.real("t_time"), tm = c.real("marker_time");
  const double budget = c.real("bias_factor") * cfg.dt;
  std::vector<std::pair<std::string, MartingaleTest>> battery;
  battery.push_back({"x1", {cyl_linear(0), ts, tt, {}}});
  battery.push_back({"x1_squared", {cyl_square(0), ts, tt, {}}});
  battery.push_back({"cos_x1|cos_x2", {cyl_cos(0), ts, tt, {{tm, cyl_cos(1)}}}});
  battery.push_back({"sin_x1_cos_x2|gauss_x1", {cyl_sin_cos(0, 1), ts, tt, {{tm, cyl_gaussian(0)}}}});
  battery.push_back({"gauss_x2|sin_x1", {cyl_gaussian(1), ts, tt, {{tm, cyl_sin(0)}, {ts, cyl_cos(1)}}}});

  Table t{"martingale.csv", {"estimate", "stderr", "bound", "ok"}, "test"};
  bool all_ok = true;
  double worst = 0.0;
  auto record = [&](const std::string& label, const MCEstimate& e) {
    const double bound = 3.0 * e.std_error + budget;
    const bool ok = std::abs(e.value) <= bound;
    all_ok = all_ok && ok;
    worst = std::max(worst, std::abs(e.value) / bound);
    t.add({e.value, e.std_error, bound, ok ? 1.0 : 0.0}, label);
  };
  for (const auto& [label, test] : battery) {
    if (cfg.stop_radius && std::isfinite(*cfg.stop_radius))
      record("stopped:" + label, stopped_martingale_residual(ensemble, *cfg.stop_radius, test, s, F));
    else
      record(label, martingale_residual(ensemble, test, s, F));
  }
  std::vector<std::size_t> qv;
  for (double v : c.reals("qv_modes")) {
    const auto k = static_cast<std::size_t>(std::llround(v));
    if (k < 1 || k > s.modes() || std::abs(v - static_cast<double>(k)) > 0) throw std::invalid_argument("experiment.qv_modes: invalid mode");
    qv.push_back(k - 1);
  }
  const std::string pre = cfg.stop_radius && std::isfinite(*cfg.stop_radius) ? "stopped:" : "";
  for (std::size_t a = 0; a < qv.size(); ++a) {
    record(pre + "qv_" + std::to_string(qv[a] + 1), quadratic_variation_residual(ensemble, s, F, qv[a], ts, tt));
    for (std::size_t b = a + 1; b < qv.size(); ++b)
      record(pre + "cross_" + std::to_string(qv[a] + 1) + "_" + std::to_string(qv[b] + 1),
             quadratic_variation_residual(ensemble, s, F, qv[a], qv[b], ts, tt));
  }
  ExperimentResult r;
  r.tables.push_back(std::move(t));
  r.verdict = {all_ok, "max_abs_residual_over_bound", worst, 1.0,
               std::to_string(count_failed(ensemble)) + " failed paths"};
  return r;
}

std::vector<double> terminal_values(const std::vector<PathSample>& ens, std::size_t k) {
  std::vector<double> v;
  for (const auto& p : ens)
    if (!p.failed) v.push_back(p.state(p.size() - 1)[k]);
  return v;
}

ExperimentResult run_uniqueness(const ExperimentConfig& c) {
  const Spectrum s = build_spectrum(c);
  const std::string mode = c.text("mode");
  const bool flip = c.text("control") == "sign_flip";
  const State x0 = x0_state(c, s);
  SolverConfig cfg = build_solver(c);
  ExperimentResult r;

  if (mode == "closure") {
    if (c.drift.kind != "constant") throw std::invalid_argument("drift.kind: uniqueness closure requires constant");
    const State z = z_state(c, s);
    cfg.record_noise = true;
    cfg.save_stride = 1;
    const auto ref = simulate_ensemble(s, DriftSpec::zero(), x0, cfg, c.mc.N, c.mc.seed);
    State zz = z;
    if (flip)
      for (double& v : zz.coeffs) v = -v;
    const DriftSpec W = DriftSpec::constant(zz);
    std::vector<double> w;
    for (const auto& p : ref) w.push_back(girsanov_weight(p, W, s));
    Table t{"closure.csv", {"reweighted", "reweighted_stderr", "reference", "reference_stderr", "diff", "bound", "ok"}, "quantity"};
    bool all_ok = true;
    double worst = 0.0;
    auto record = [&](const std::string& label, const MCEstimate& a, const MCEstimate& b) {
      const double diff = a.value - b.value;
      const double bound = 3.0 * combined_se(a, b);
      const bool ok = std::abs(diff) <= bound;
      all_ok = all_ok && ok;
      worst = std::max(worst, std::abs(diff) / bound);
      t.add({a.value, a.std_error, b.value, b.std_error, diff, bound, ok ? 1.0 : 0.0}, label);
    };
    SampleSums ws(1);
    for (double v : w) ws.add(std::span<const double>(&v, 1));
    record("mean_weight", ws.estimate(0), MCEstimate{1.0, 0.0, c.mc.N});
    std::uint64_t j = 0;
    for (const auto& name : c.words("functions")) {
      need_modes(s, arity_of(name), "function " + name);
      const CylindricalFunction f = catalogue_function(name, 0);
      SampleSums acc(1);
      for (std::size_t i = 0; i < ref.size(); ++i) {
        const double v = w[i] * f(ref[i].state(ref[i].size() - 1));
        acc.add(std::span<const double>(&v, 1));
      }
      const MCEstimate ou = ou_eval(s, z, cfg.horizon, f, x0, static_cast<std::size_t>(c.integer("ou_samples")),
                                    RngStream(c.mc.seed, kProbeStream + (++j)));
      record(name, acc.estimate(0), ou);
    }
    r.tables.push_back(std::move(t));
    r.verdict = {all_ok, "max_abs_diff_over_bound", worst, 1.0, "effective sample size " + fmt(effective_sample_size(w), 6)};
    return r;
  }

  const auto k = static_cast<std::size_t>(c.integer("functional_mode"));
  need_modes(s, k, "experiment.functional_mode");
  const auto reps = static_cast<std::size_t>(c.integer("meta_reps"));
  const auto shuffles = static_cast<std::size_t>(c.integer("shuffles"));
  const double alpha = c.real("alpha");
  const DriftSpec F = build_drift(c, s);
  DriftSpec F_ref, B;
  if (mode == "burgers") {
    if (c.drift.kind != "classical_burgers_nonlocal")
      throw std::invalid_argument("drift.kind: uniqueness burgers requires classical_burgers_nonlocal");
    ScalarFunction g = c.drift.function == "table" ? ScalarFunction::table(c.drift.table_x, c.drift.table_y)
                                                   : ScalarFunction::from_name(c.drift.function, c.drift.amplitude, c.drift.exponent);
    if (flip) g = g.scaled(-1.0);
    F_ref = DriftSpec::classical_burgers();
    B = DriftSpec::smoothed(DriftSpec::nonlocal(g));
  } else if (flip) {
    throw std::invalid_argument("experiment.control: sign_flip applies to modes closure and burgers");
  }
  SolverConfig ref_cfg = cfg;
  ref_cfg.record_noise = mode == "burgers";
  if (ref_cfg.record_noise) ref_cfg.save_stride = 1;

  Table t{"meta.csv", {"rep", "ks", "threshold", "p_value", "reject", "ess_a", "ess_b", "n_a", "n_b"}};
  std::size_t rejected = 0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const std::uint64_t seed_a = mix64(c.mc.seed * 2 + 2 * rep);
    const std::uint64_t seed_b = mix64(c.mc.seed * 2 + 2 * rep + 1);
    LawComparison comp;
    const auto ens_a = simulate_ensemble(s, F, x0, cfg, c.mc.N, seed_a);
    comp.a = terminal_values(ens_a, k - 1);
    if (mode == "burgers") {
      const auto ens_b = simulate_ensemble(s, F_ref, x0, ref_cfg, c.mc.N, seed_b);
      for (const auto& p : ens_b) {
        if (p.failed) continue;
        comp.b.push_back(p.state(p.size() - 1)[k - 1]);
        comp.weights_b.push_back(girsanov_weight(p, B, s));
      }
    } else {
      comp.b = terminal_values(simulate_ensemble(s, F, x0, cfg, c.mc.N, seed_b), k - 1);
    }
    const ComparisonResult res = weak_uniqueness_compare(comp, RngStream(c.mc.seed, kProbeStream + rep), shuffles, alpha);
    if (!res.pass) ++rejected;
    t.add({static_cast<double>(rep + 1), res.ks_distance, res.threshold, res.p_value, res.pass ? 0.0 : 1.0, res.ess_a,
           res.ess_b, static_cast<double>(comp.a.size()), static_cast<double>(comp.b.size())});
  }
  const double rate = static_cast<double>(rejected) / static_cast<double>(reps);
  const double limit = c.real("max_reject_rate");
  r.tables.push_back(std::move(t));
  Table summary{"summary.csv", {"meta_reps", "rejected", "rejection_rate", "max_reject_rate"}};
  summary.add({static_cast<double>(reps), static_cast<double>(rejected), rate, limit});
  r.tables.push_back(std::move(summary));
  r.verdict = {rate <= limit, "rejection_rate", rate, limit,
               mode + (flip ? " with sign-flipped control" : "") + ", " + std::to_string(rejected) + "/" +
                   std::to_string(reps) + " rejected"};
  return r;
}

ExperimentResult run_exp_moment(const ExperimentConfig& c) {
  const Spectrum s = build_spectrum(c);
  const DriftSpec F = build_drift(c, s);
  const SolverConfig cfg = build_solver(c);
  const auto ensemble = simulate_ensemble(s, F, x0_state(c, s), cfg, c.mc.N, c.mc.seed);
  Table t{"expmoment.csv", {"T", "estimate", "stderr", "max_share", "ess", "heavy_tail", "used"}};
  bool finite = true;
  for (double T : c.reals("horizons")) {
    if (T > cfg.horizon + 1e-12) throw std::invalid_argument("experiment.horizons: exceeds solver.T");
    const ExpMomentResult e = exp_moment_probe(ensemble, s, T);
    finite = finite && std::isfinite(e.estimate.value) && std::isfinite(e.estimate.std_error);
    t.add({T, e.estimate.value, e.estimate.std_error, e.max_share, e.ess, e.heavy_tail ? 1.0 : 0.0,
           static_cast<double>(e.used)});
  }
  ExperimentResult r;
  r.tables.push_back(std::move(t));
  r.verdict = {finite, "finite", finite ? 1.0 : 0.0, 1.0, std::to_string(count_failed(ensemble)) + " failed paths"};
  return r;
}

}  // namespace

void Table::add(std::vector<double> row, std::string label) {
  if (row.size() != columns.size()) throw std::logic_error("Table::add: column count mismatch in " + file);
  rows.push_back(std::move(row));
  if (!label_column.empty()) labels.push_back(std::move(label));
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("Table: no column '" + name + "' in " + file);
  return static_cast<std::size_t>(it - columns.begin());
}

double Table::at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }

const Table& ExperimentResult::table(const std::string& file) const {
  for (const auto& t : tables)
    if (t.file == file) return t;
  throw std::out_of_range("ExperimentResult: no table " + file);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult r;
  const std::string& e = cfg.experiment;
  if (e == "simulate") r = run_simulate(cfg);
  else if (e == "ou-eval") r = run_ou_eval(cfg);
  else if (e == "resolvent") r = run_resolvent(cfg);
  else if (e == "verify-bounds") r = run_verify_bounds(cfg);
  else if (e == "verify-regularity") r = run_verify_regularity(cfg);
  else if (e == "contraction") r = run_contraction(cfg);
  else if (e == "martingale-check") r = run_martingale(cfg);
  else if (e == "uniqueness") r = run_uniqueness(cfg);
  else if (e == "exp-moment") r = run_exp_moment(cfg);
  else throw std::invalid_argument("experiment.type: unknown experiment '" + e + "'");
  r.name = e;
  r.seed = cfg.mc.seed;
  return r;
}

std::string format_csv(const Table& t, int precision) {
  std::ostringstream o;
  bool first = true;
  if (!t.label_column.empty()) {
    o << t.label_column;
    first = false;
  }
  for (const auto& col : t.columns) {
    o << (first ? "" : ",") << col;
    first = false;
  }
  o << "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    first = true;
    if (!t.label_column.empty()) {
      o << t.labels[i];
      first = false;
    }
    for (double v : t.rows[i]) {
      o << (first ? "" : ",") << fmt(v, precision);
      first = false;
    }
    o << "\n";
  }
  return o.str();
}

std::string format_verdict(const ExperimentResult& r) {
  std::ostringstream o;
  o << "experiment = " << r.name << "\n"
    << "statistic = " << r.verdict.statistic << "\n"
    << "value = " << fmt(r.verdict.value) << "\n"
    << "threshold = " << fmt(r.verdict.threshold) << "\n"
    << "result = " << (r.verdict.pass ? "pass" : "fail") << "\n"
    << "seed = " << r.seed << "\n"
    << "detail = " << r.verdict.detail << "\n";
  return o.str();
}

std::string summary_line(const ExperimentResult& r) {
  return r.name + ": " + (r.verdict.pass ? "PASS" : "FAIL") + " " + r.verdict.statistic + "=" +
         fmt(r.verdict.value, 6) + " threshold=" + fmt(r.verdict.threshold, 6) + " (" + r.verdict.detail + ")";
}

void write_artifacts(const ExperimentResult& r, const std::string& dir, int precision) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& text) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  };
  for (const auto& t : r.tables) put(t.file, format_csv(t, precision));
  put("verdict.txt", format_verdict(r));
}

}  // namespace cspde
