#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cspde/config.hpp"
#include "cspde/experiments.hpp"

namespace {

struct Invocation {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

int run(const std::string& name, const Invocation& inv) {
  cspde::ExperimentConfig cfg;
  try {
    cfg = cspde::load_config(inv.config);
  } catch (const std::exception& e) {
    std::cerr << "critical-spde: " << e.what() << "\n";
    return 2;
  }
  if (cfg.experiment != name) {
    std::cerr << "critical-spde: config " << inv.config << " has experiment.type = " << cfg.experiment
              << ", subcommand is " << name << "\n";
    return 2;
  }
  if (inv.seed) cfg.mc.seed = *inv.seed;
  if (inv.out) cfg.output.dir = *inv.out;

  cspde::ExperimentResult result;
  try {
    result = cspde::run_experiment(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "critical-spde: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "critical-spde: " << name << " aborted: " << e.what() << "\n";
    return 2;
  }
  try {
    cspde::write_artifacts(result, cfg.output.dir, cfg.output.precision);
  } catch (const std::exception& e) {
    std::cerr << "critical-spde: " << e.what() << "\n";
    return 2;
  }
  std::cout << cspde::summary_line(result) << std::endl;
  return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin experiments for SPDEs with critical drift"};
  app.require_subcommand(1);
  app.footer("Worker threads: CSPDE_THREADS (results do not depend on it).\n"
             "Exit status: 0 pass, 1 experiment check failed, 2 usage, config or I/O error.\n\n" +
             cspde::config_reference());

  Invocation inv;
  std::string chosen;
  for (const auto& name : cspde::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", inv.config, "config file")->required();
    sub->add_option("--seed", inv.seed, "override mc.seed");
    sub->add_option("--out", inv.out, "override output.dir");
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return run(chosen, inv);
}
