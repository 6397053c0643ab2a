#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cspde/config.hpp"
#include "cspde/experiments.hpp"
#include "cspde/parallel.hpp"

using namespace cspde;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const ExperimentConfig c = parse_config("[model]\nmodel = burgers1d\n[experiment]\ntype = verify-bounds\n");
  CHECK(c.model.m == 16);
  CHECK(c.solver.dt == 1e-3);
  CHECK(c.mc.seed == 1);
  CHECK(c.output.precision == 17);
  CHECK(c.integer("points") == 40);
  CHECK(c.drift.kind == "zero");
}

TEST_CASE("errors name the offending key") {
  CHECK(error_of("[solver]\ndt = -0.1\n[experiment]\ntype = simulate\n").find("solver.dt") != std::string::npos);
  CHECK(error_of("[solver]\ndt = abc\n[experiment]\ntype = simulate\n").find("solver.dt") != std::string::npos);
  CHECK(error_of("[model]\ncolour = red\n[experiment]\ntype = simulate\n").find("model.colour") != std::string::npos);
  CHECK(error_of("[experiment]\ntype = simulate\npoints = 3\n").find("experiment.points") != std::string::npos);
  CHECK(error_of("[model]\nm = 4\nm = 5\n[experiment]\ntype = simulate\n").find("model.m") != std::string::npos);
  CHECK(error_of("[model]\nm = 4\n").find("experiment.type") != std::string::npos);
  CHECK(error_of("[experiment]\ntype = dance\n").find("experiment.type") != std::string::npos);
  CHECK(error_of("[nowhere]\nx = 1\n[experiment]\ntype = simulate\n").find("nowhere") != std::string::npos);
  CHECK(error_of("[mc]\nN = 0\n[experiment]\ntype = simulate\n").find("mc.N") != std::string::npos);
  CHECK(error_of("[drift]\nkind = zigzag\n[experiment]\ntype = simulate\n").find("drift.kind") != std::string::npos);
}

TEST_CASE("emit and parse round trip") {
  const std::string text =
      "# comment\n[model]\nmodel = cahn_hilliard3d\nm = 6\nnoise = inverse_square\n"
      "[drift]\nkind = cahn_hilliard\nfunction = table\ntable_x = 0, 1\ntable_y = 0, 0.5\ntruncate = 3\n"
      "[solver]\ndt = 0.01\nT = 0.5\nstop_radius = 4\nx0 = 0.1, 0.2\n"
      "[mc]\nN = 77\nseed = 9\n[experiment]\ntype = resolvent\nlambdas = 3, 5\n[output]\nprecision = 12\n";
  const ExperimentConfig a = parse_config(text);
  const std::string once = emit_config(a);
  const ExperimentConfig b = parse_config(once);
  CHECK(emit_config(b) == once);
  CHECK(b.model.model == Model::CahnHilliard3D);
  CHECK(*b.drift.truncate == 3.0);
  CHECK(b.reals("lambdas") == std::vector<double>{3.0, 5.0});
  CHECK(b.solver.x0 == std::vector<double>{0.1, 0.2});
  CHECK(b.output.precision == 12);
}

TEST_CASE("help text lists every experiment") {
  const std::string ref = config_reference();
  for (const auto& name : experiment_names()) CHECK(ref.find(name) != std::string::npos);
}

TEST_CASE("verify-bounds artifacts and determinism") {
  const ExperimentConfig c = parse_config("[model]\nm = 64\n[experiment]\ntype = verify-bounds\n");
  const ExperimentResult r = run_experiment(c);
  CHECK(r.exit_code() == 0);
  const Table& t = r.table("bounds.csv");
  CHECK(t.columns == std::vector<std::string>{"t", "lambda_norm", "c1_bound", "sqrtA_lambda_norm", "c2_bound"});
  CHECK(t.rows.size() == 40);
  CHECK(format_csv(t).rfind("t,lambda_norm,c1_bound,sqrtA_lambda_norm,c2_bound\n", 0) == 0);
  CHECK(format_verdict(r).find("result = pass") != std::string::npos);
}

TEST_CASE("same seed gives byte identical csv at any worker count") {
  const std::string text =
      "[model]\nm = 4\n[drift]\nkind = burgers\nfunction = tanh\n[solver]\ndt = 0.01\nT = 0.2\n"
      "[mc]\nN = 3000\nseed = 7\n[experiment]\ntype = simulate\n";
  const ExperimentConfig c = parse_config(text);
  const auto dir = std::filesystem::temp_directory_path() / "cspde_config_test";
  set_worker_count(1);
  write_artifacts(run_experiment(c), (dir / "a").string());
  set_worker_count(8);
  write_artifacts(run_experiment(c), (dir / "b").string());
  set_worker_count(0);
  for (const char* f : {"moments.csv", "modes.csv", "path.csv", "verdict.txt"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  CHECK_FALSE(slurp(dir / "a" / "path.csv").empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("run-time configuration errors") {
  CHECK_THROWS_AS(run_experiment(parse_config("[model]\nm = 1\n[experiment]\ntype = martingale-check\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      run_experiment(parse_config("[experiment]\ntype = uniqueness\nmode = burgers\nmeta_reps = 1\n")),
      std::invalid_argument);
}

TEST_CASE("exp-moment and contraction run") {
  const ExperimentResult e = run_experiment(parse_config(
      "[model]\nm = 4\n[solver]\ndt = 0.025\nT = 0.1\n[mc]\nN = 200\n[experiment]\ntype = exp-moment\n"));
  CHECK(e.table("expmoment.csv").rows.size() == 3);
  const ExperimentResult k = run_experiment(parse_config(
      "[model]\nm = 3\n[drift]\nkind = burgers\nfunction = tanh\n[mc]\nN = 500\n"
      "[experiment]\ntype = contraction\nprobes = 3\nlambdas = 4, 64\n"));
  CHECK(k.table("contraction.csv").rows.size() == 2);
  CHECK(k.exit_code() == 0);
}
