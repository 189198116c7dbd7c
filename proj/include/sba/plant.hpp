#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sba/chamber.hpp"

namespace sba {

struct PlateType {
  int type_id = 0;
  double probability = 0.0;
  double lot_mean = 0.0;  // pallets
  double lot_cv = 0.0;
  std::string program_id;
};

// Full scenario: production-order process, plate-type mix, chamber, the
// four programs, and the simulation calendar. The calendar counts working
// days only; operation within a working day is continuous.
struct ScenarioConfig {
  double interarrival_mean_days = 10.0;  // working days between orders
  double interarrival_cv = 0.2;
  double preproduction_mean_days = 1.0;
  double preproduction_cv = 0.5;
  double loading_mean_min_per_pallet = 4.0;
  double loading_cv = 0.2;
  int chamber_capacity = 32;
  double tau = 10.0;  // minutes
  double minutes_per_working_day = 1440.0;
  double working_days_per_year = 260.0;
  int horizon_years = 4;
  int warmup_years = 1;
  double cv_min_energy = 0.30;  // environment CV, overridable per design point
  std::vector<PlateType> plate_types;
  std::vector<HeatTreatmentProgram> programs;

  double minutes_per_year() const {
    return minutes_per_working_day * working_days_per_year;
  }
  double warmup_end_minutes() const {
    return static_cast<double>(warmup_years) * minutes_per_year();
  }
  double horizon_minutes() const {
    return static_cast<double>(horizon_years) * minutes_per_year();
  }

  const HeatTreatmentProgram& program(const std::string& id) const;
  void validate() const;
};

// Loads a scenario from its JSON file; curve files are resolved relative
// to the scenario file's directory.
ScenarioConfig load_scenario(const std::string& path);

struct ProductionOrder {
  long order_id = 0;
  int type_id = 0;
  std::string program_id;
  long lot_size = 0;       // pallets, >= 1
  double arrival_time = 0.0;  // simulation minutes
  double ready_time = 0.0;    // arrival + pre-production delay
};

// Order stream over the whole horizon; arrival times strictly increasing.
std::vector<ProductionOrder> generate_orders(const ScenarioConfig& cfg,
                                             RngStream& rng);

// Splits a lot into batches of at most `capacity` pallets, preserving
// order; all but the last batch are full.
std::vector<long> split_into_batches(long lot_size, int capacity);

// Sample standard deviation of the terminal Bayesian estimates for one
// step across the given (warm-up) records. Falls back to `fallback` when
// fewer than two records are available.
double sigma_from_warmup(std::span<const BatchRecord> records, StepKind step,
                         double fallback, bool* fell_back = nullptr);

// Single-chamber FIFO simulation over the configured horizon. The result
// is a pure function of (cfg, policy, root stream).
std::vector<BatchRecord> simulate(const ScenarioConfig& cfg,
                                  const PolicySpec& policy,
                                  const RngStream& root);

}  // namespace sba
