#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cspde/config.hpp"

namespace cspde {

/// Numeric CSV table with an optional leading text column.
struct Table {
  std::string file;
  std::vector<std::string> columns;
  std::string label_column;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;

  Table() = default;
  Table(std::string f, std::vector<std::string> cols, std::string label = {})
      : file(std::move(f)), columns(std::move(cols)), label_column(std::move(label)) {}
  void add(std::vector<double> row, std::string label = {});
  std::size_t column(const std::string& name) const;
  double at(std::size_t row, const std::string& name) const;
};

struct Verdict {
  bool pass = true;
  std::string statistic;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ExperimentResult {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<Table> tables;
  Verdict verdict;

  const Table& table(const std::string& file) const;
  int exit_code() const { return verdict.pass ? 0 : 1; }
};

/// Runs the experiment named in cfg.experiment. Throws std::invalid_argument on
/// configuration problems the parser cannot see.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string format_csv(const Table& t, int precision = 17);
std::string format_verdict(const ExperimentResult& r);
std::string summary_line(const ExperimentResult& r);

/// Writes every table and verdict.txt into dir (created if missing).
/// Throws std::runtime_error on I/O failure.
void write_artifacts(const ExperimentResult& r, const std::string& dir, int precision = 17);

}  // namespace cspde
