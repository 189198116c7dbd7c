#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sba/plant.hpp"

namespace sba {

// Full-factorial experiment grid. The default is the full benchmark
// design: 3 CV x 12 main factors x 12 rework factors OPT points plus
// 3 CV x 10 alpha0 x 12 beta x 12 rework factors SBA points.
struct DesignGrid {
  std::vector<double> cv_levels{0.15, 0.30, 0.45};
  std::vector<double> alpha0_levels;       // default 0.05..0.50 step 0.05
  std::vector<double> main_factor_levels;  // default 0.70..1.25 step 0.05
  std::vector<double> rework_factor_levels;  // default 0.05..0.60 step 0.05
  std::vector<double> beta_levels;           // default 0.40..0.95 step 0.05
  int replications = 20;
  double alpha_floor = 0.02;
  bool include_baseline = false;  // adds fixed-time factor-1.2 points
  bool include_ideal = false;     // adds perfect-information points
  // When set, all design points share per-replication seeds (common
  // random numbers); otherwise each point gets its own seed family.
  bool common_random_numbers = false;
  std::optional<int> horizon_years;  // scenario overrides
  std::optional<int> warmup_years;

  static DesignGrid benchmark_defaults();
  void validate() const;
};

DesignGrid load_grid(const std::string& path);

struct DesignPoint {
  long point_id = 0;
  PolicySpec policy;
  double cv = 0.0;
  double rework_factor = 0.0;
};

// Stable enumeration: OPT block, then SBA, then optional Baseline/Ideal.
std::vector<DesignPoint> enumerate_grid(const DesignGrid& grid);

// One results-store row: run-level aggregates over post-warm-up batches.
struct RunRow {
  long point_id = 0;
  int replication = 0;
  std::string policy;
  double cv = 0.0;
  double alpha0 = 0.0;       // SBA only, else 0
  double beta = 0.0;         // SBA only, else 0
  double main_factor = 0.0;  // OPT/Baseline only, else 0
  double rework_factor = 0.0;
  long batch_count = 0;
  double mean_energy_per_batch = 0.0;
  double rework_ratio = 0.0;
  double mean_inspections_per_batch = 0.0;
};

RunRow summarize_run(const DesignPoint& point, int replication,
                     std::span<const BatchRecord> records);

// Applies a design point's environment and rework factor to a scenario.
ScenarioConfig apply_point(const ScenarioConfig& base, const DesignGrid& grid,
                           const DesignPoint& point);

RngStream run_stream(const DesignGrid& grid, const DesignPoint& point,
                     int replication);

struct SweepOptions {
  int parallelism = 1;
  std::string output_dir;
  std::string scenario_digest;
  std::string grid_digest;
};

struct SweepOutcome {
  long executed = 0;
  long skipped = 0;  // already present from a previous invocation
  long failed = 0;
};

// Executes every (point, replication) pair, one row file per run written
// atomically (temp + rename), then merges them into `results.csv` plus a
// `manifest.json` sidecar. Re-invocation skips completed runs.
SweepOutcome run_sweep(const DesignGrid& grid, const ScenarioConfig& scenario,
                       const SweepOptions& options);

std::vector<RunRow> read_store(const std::string& results_csv);
void write_store(const std::string& path, const std::vector<RunRow>& rows,
                 const std::vector<std::string>& provenance_comments);

std::string format_row(const RunRow& row);
RunRow parse_row(const std::string& line);
extern const char* kRunRowHeader;

}  // namespace sba
