#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arvdm/decomposition.hpp"
#include "arvdm/lower_bound.hpp"
#include "arvdm/sampler.hpp"

namespace arvdm {

/// Thrown on unreadable/unparseable inputs; the CLI maps it to exit code 2.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 17-significant-digit decimal, the fixed serialization used in CSV output.
std::string format_g17(double v);

NoiseLadder parse_ladder_json(const std::string& text);
std::string ladder_to_json(const NoiseLadder& ladder);

struct SweepSpec {
  std::string axis;                 // M_ar | M_init | M | T | bias | window_m | K | rho
  std::vector<std::string> values;  // parsed per axis (rationals allowed for T)
};

struct ExperimentConfig {
  RunConfig run;
  int grid_init_steps = 64;
  int grid_ar_steps = 64;
  std::optional<SweepSpec> sweep;

  /// Re-derives the grids from the ladder and step counts.
  void rebuild_grids();
};

ExperimentConfig parse_experiment_config(const std::string& text);

/// Report writers. Deterministic: identical reports give identical bytes.
std::string report_to_json(const DecompositionReport& report);
std::string report_csv_header();
std::string report_csv_row(const DecompositionReport& report,
                           const std::string& axis, const std::string& value);

struct DecomposeOutput {
  std::string json;  // structured-text report (one document, sweeps as a list)
  std::string csv;   // header + one row per sweep point
};

/// Runs the configured decomposition (or sweep). Sweep points may execute
/// concurrently; rows are merged in declaration order.
DecomposeOutput run_decompose(const ExperimentConfig& config, int threads);

struct LowerBoundConfig {
  double s = 0.5;
  int n = 10'000;
  int trials = 100;
  std::uint64_t seed = 0;
};

std::string run_lower_bound_report(const LowerBoundConfig& config);

/// Clean-frame sample dump, one path per row, 17-digit decimals.
std::string run_sample_csv(const ExperimentConfig& config, int n_paths);

/// Minimal CSV table for plotting: one header row, numeric cells.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  static CsvTable parse(const std::string& text);
  int column_index(const std::string& name) const;  // -1 when absent
};

}  // namespace arvdm
