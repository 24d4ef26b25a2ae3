#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trunctest/instances.hpp"
#include "trunctest/testers.hpp"

namespace trunctest {

struct GridCell {
  TesterKind tester;
  InstanceKind instance;
  int d;
  double alpha;
  double eps;
  std::vector<std::int64_t> n_ladder;
};

struct SweepSpec {
  std::vector<GridCell> grid;
  int trials = 200;
  std::uint64_t base_seed = 1;
  std::filesystem::path output_dir;
  int threads = 1;
  // Threshold constants per tester; filled from the calibration manifest or
  // the frozen defaults.
  double c_thr_unknown = 1.5;
  double c_thr_known = 0.05;
  double c_thr_ltt = 1.0;
};

struct RatePoint {
  std::int64_t n;
  std::int64_t successes;  // ACCEPT on null cells, REJECT on soundness cells
  std::int64_t trials;
  double rate;
  double halfwidth;  // Wilson 95%
};

struct PowerCurve {
  GridCell cell;
  std::vector<RatePoint> rates;
};

/// Desk-scale phase-transition grid (the three regimes x tester knowledge).
SweepSpec default_sweep_spec();

SweepSpec sweep_spec_from_json(const nlohmann::json& config);
nlohmann::json sweep_spec_to_json(const SweepSpec& spec);

/// FNV-1a hash of the canonical config JSON; stamped into every result row.
std::string config_hash(const SweepSpec& spec);

/// Runs every cell. Deterministic given base_seed. Completed (cell, n) pairs
/// are checkpointed to results.partial.csv inside output_dir so interrupted
/// runs resume; the final results.csv is byte-stable.
std::vector<PowerCurve> run_sweep(const SweepSpec& spec);

/// Writes results.csv, summary.json and per-curve plot data files.
void emit_report(const std::vector<PowerCurve>& curves, const SweepSpec& spec);

/// Parse results.csv back into curves (round-trip of emit_report).
std::vector<PowerCurve> parse_results_csv(const std::filesystem::path& csv_path);

}  // namespace trunctest
