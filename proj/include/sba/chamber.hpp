#pragma once

#include <optional>
#include <string>

#include "sba/curve.hpp"
#include "sba/stopping.hpp"

namespace sba {

enum class StepKind { kCuring, kHumidity };

const char* to_string(StepKind step);

// One of the four heat-treatment programs: its energy curves, expected
// minimum energies for both stopping problems, and the rework/re-warm-up
// energy parameters.
struct HeatTreatmentProgram {
  std::string program_id;
  EnergyCurve maturation_curve;
  EnergyCurve drying_curve;
  double expected_min_energy_curing = 0.0;
  double expected_min_energy_humidity = 0.0;
  double rewarm_energy = 0.0;  // psi^r per cycle; 0 selects the bundled
                               // default (first 60 min of the drying curve)
  double rewarm_time = 60.0;   // minutes per cycle
  double rework_factor = 0.2;  // psi^g = rework_factor * E[phi] per step

  void validate() const;
};

// Program with its cumulative curves discretized at the simulation tau.
class PreparedProgram {
 public:
  PreparedProgram(HeatTreatmentProgram program, double tau);

  const HeatTreatmentProgram& program() const { return program_; }
  double tau() const { return tau_; }
  const CumulativeCurve& cumulative(StepKind step) const;
  const EnergyCurve& curve(StepKind step) const;
  double expected_min_energy(StepKind step) const;
  double rewarm_energy() const { return rewarm_energy_; }
  double rework_energy(StepKind step) const;  // psi^g
  // Wall-clock minutes of one rework cycle for the step (re-warm-up plus
  // rework at the end-of-curve energy rate).
  double rework_cycle_minutes(StepKind step) const;

 private:
  HeatTreatmentProgram program_;
  double tau_;
  CumulativeCurve maturation_;
  CumulativeCurve drying_;
  double rewarm_energy_;
};

struct StepResult {
  long stopping_iteration = 0;  // N
  double applied_time = 0.0;    // (N + 1) * tau, minutes
  double main_energy = 0.0;     // cumulative energy at N
  long rework_cycles = 0;       // J
  double rework_energy_total = 0.0;
  double rewarm_energy_total = 0.0;
  long inspections = 0;
  double hidden_min_energy = 0.0;
  double terminal_estimate = 0.0;  // SBA only; hidden_min_energy otherwise
  double duration_minutes = 0.0;   // applied time plus rework cycles

  double total_energy() const {
    return main_energy + rework_energy_total + rewarm_energy_total;
  }
};

struct BatchRecord {
  long order_id = 0;
  long batch_id = 0;
  std::string program_id;
  long pallets = 0;
  StepResult curing;
  StepResult humidity;
  double loading_time = 0.0;    // minutes
  double unloading_time = 0.0;  // minutes
  double total_duration = 0.0;  // loading + both steps + unloading
  double total_reported_energy = 0.0;  // loading excluded
  long inspection_count = 0;
  double completed_at = 0.0;  // simulation minutes
  bool in_warmup = false;
};

// Runs one stopping problem: picks N via the policy, then applies rework
// cycles until the hidden requirement is met, accounting all energy.
StepResult run_stopping_problem(const PreparedProgram& prepared, StepKind step,
                                const PolicySpec& policy, double phi_draw,
                                double sigma_estimate, RngStream& rng);

// Random inputs for one batch, pre-forked so that the hidden energy draws
// are identical across policies under a common seed.
struct BatchRngs {
  RngStream times;
  RngStream phi_curing;
  RngStream phi_humidity;
  RngStream noise_curing;
  RngStream noise_humidity;

  static BatchRngs from(const RngStream& parent);
};

// Full batch lifecycle: loading, curing problem, humidity problem,
// unloading. cv_min_energy is the environment CV applied to both hidden
// draws; sigma_* feed the SBA thresholds.
BatchRecord run_batch(const PreparedProgram& prepared, const PolicySpec& policy,
                      double cv_min_energy, double sigma_curing,
                      double sigma_humidity, long pallets,
                      double loading_mean_min_per_pallet, double loading_cv,
                      BatchRngs& rngs);

}  // namespace sba
