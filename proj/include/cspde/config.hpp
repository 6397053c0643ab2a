#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cspde/drift.hpp"
#include "cspde/solver.hpp"
#include "cspde/spectral.hpp"

namespace cspde {

struct ModelBlock {
  Model model = Model::Burgers1D;
  std::size_t m = 16;
  std::size_t grid = 0;  // 0 picks the smallest admissible grid
  NoiseRule noise = NoiseRule::Cylindrical;
};

struct DriftBlock {
  // zero | constant | burgers | cahn_hilliard | nonlocal | classical_burgers |
  // classical_burgers_nonlocal (F_0 + (-A)^{-1/2} g(|y|) y)
  std::string kind = "zero";
  std::string function = "identity";
  double amplitude = 1.0;
  double exponent = 1.0;
  std::vector<double> table_x;
  std::vector<double> table_y;
  std::vector<double> z;  // constant drift, padded with zeros to m
  std::optional<double> truncate;
};

struct SolverBlock {
  double dt = 1e-3;
  double T = 1.0;
  std::size_t save_stride = 1;
  std::optional<double> stop_radius;
  bool record_noise = false;
  std::vector<double> x0;  // padded with zeros to m
};

struct McBlock {
  std::size_t N = 1000;
  std::uint64_t seed = 1;
};

struct OutputBlock {
  std::string dir = "out";
  int precision = 17;
};

struct ExperimentConfig {
  ModelBlock model;
  DriftBlock drift;
  SolverBlock solver;
  McBlock mc;
  std::string experiment;
  std::map<std::string, std::string> params;  // [experiment] keys, defaults filled
  OutputBlock output;

  /// Typed access to [experiment] keys; all keys are present after parsing.
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;
};

/// Experiment names accepted by the parser and the command line.
const std::vector<std::string>& experiment_names();

/// Parses flat `[section]` / `key = value` text with `#` comments. Errors
/// name the offending `section.key`. Throws std::invalid_argument.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Full config text including defaults; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& cfg);

/// Documentation of every key and default, for --help.
std::string config_reference();

Spectrum build_spectrum(const ExperimentConfig& cfg);
DriftSpec build_drift(const ExperimentConfig& cfg, const Spectrum& s);
SolverConfig build_solver(const ExperimentConfig& cfg);
State padded_state(const std::vector<double>& values, std::size_t m, const char* key);

}  // namespace cspde
