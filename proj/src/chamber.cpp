#include "sba/chamber.hpp"

#include <cmath>
#include <stdexcept>

namespace sba {

const char* to_string(StepKind step) {
  return step == StepKind::kCuring ? "curing" : "humidity";
}

void HeatTreatmentProgram::validate() const {
  if (!(expected_min_energy_curing > 0.0) ||
      !(expected_min_energy_humidity > 0.0)) {
    throw std::invalid_argument("HeatTreatmentProgram: expected energies must be > 0");
  }
  if (rewarm_energy < 0.0) {
    throw std::invalid_argument("HeatTreatmentProgram: rewarm_energy must be >= 0");
  }
  if (!(rework_factor > 0.0)) {
    throw std::invalid_argument("HeatTreatmentProgram: rework_factor must be > 0");
  }
  if (rewarm_time != 60.0) {
    throw std::invalid_argument("HeatTreatmentProgram: rewarm_time is fixed at 60 min");
  }
}

PreparedProgram::PreparedProgram(HeatTreatmentProgram program, double tau)
    : program_(std::move(program)),
      tau_(tau),
      maturation_(build_cumulative(program_.maturation_curve, tau)),
      drying_(build_cumulative(program_.drying_curve, tau)) {
  program_.validate();
  rewarm_energy_ = program_.rewarm_energy > 0.0
                       ? program_.rewarm_energy
                       : program_.drying_curve.energy_to(60.0);
}

const CumulativeCurve& PreparedProgram::cumulative(StepKind step) const {
  return step == StepKind::kCuring ? maturation_ : drying_;
}

const EnergyCurve& PreparedProgram::curve(StepKind step) const {
  return step == StepKind::kCuring ? program_.maturation_curve
                                   : program_.drying_curve;
}

double PreparedProgram::expected_min_energy(StepKind step) const {
  return step == StepKind::kCuring ? program_.expected_min_energy_curing
                                   : program_.expected_min_energy_humidity;
}

double PreparedProgram::rework_energy(StepKind step) const {
  return program_.rework_factor * expected_min_energy(step);
}

double PreparedProgram::rework_cycle_minutes(StepKind step) const {
  // Rework runs at the energy rate recorded at the end of the main step.
  const double rate_kwh_per_min = curve(step).end_rate_kw() / 60.0;
  if (rate_kwh_per_min <= 0.0) {
    throw std::runtime_error("rework_cycle_minutes: zero end-of-curve rate");
  }
  return program_.rewarm_time + rework_energy(step) / rate_kwh_per_min;
}

StepResult run_stopping_problem(const PreparedProgram& prepared, StepKind step,
                                const PolicySpec& policy, double phi_draw,
                                double sigma_estimate, RngStream& rng) {
  policy.validate();
  if (!(phi_draw > 0.0)) {
    throw std::invalid_argument("run_stopping_problem: phi_draw must be > 0");
  }
  const CumulativeCurve& curve = prepared.cumulative(step);
  const double expected = prepared.expected_min_energy(step);

  StepResult result;
  result.hidden_min_energy = phi_draw;
  result.terminal_estimate = phi_draw;

  long stop = 0;
  switch (policy.kind) {
    case PolicyKind::kSba: {
      SbaConfig cfg;
      cfg.beta = policy.beta;
      cfg.alpha0 = policy.alpha0;
      cfg.alpha_floor = policy.alpha_floor;
      cfg.tau = prepared.tau();
      cfg.sigma_estimate = sigma_estimate;
      cfg.expected_min_energy = expected;
      const SbaRunResult run = sba_run(cfg, curve, phi_draw, rng);
      stop = run.stopping_iteration;
      result.terminal_estimate = run.trace.back().estimate;
      break;
    }
    case PolicyKind::kOpt:
    case PolicyKind::kBaseline:
      stop = fixed_iterations(curve, policy.effective_factor(), expected);
      break;
    case PolicyKind::kIdeal:
      stop = ideal_iterations(curve, phi_draw);
      break;
  }

  result.stopping_iteration = stop;
  result.applied_time = static_cast<double>(stop + 1) * prepared.tau();
  result.main_energy = curve.at(stop);

  const double psi_g = prepared.rework_energy(step);
  long j = 0;
  if (result.main_energy < phi_draw) {
    j = static_cast<long>(std::ceil((phi_draw - result.main_energy) / psi_g));
    // settle floating-point slack so the minimality invariant holds exactly
    while (result.main_energy + static_cast<double>(j) * psi_g < phi_draw) ++j;
    while (j > 1 &&
           result.main_energy + static_cast<double>(j - 1) * psi_g >= phi_draw) {
      --j;
    }
  }
  result.rework_cycles = j;
  result.rework_energy_total = static_cast<double>(j) * psi_g;
  result.rewarm_energy_total = static_cast<double>(j) * prepared.rewarm_energy();
  result.inspections = (step == StepKind::kCuring ? 1 : 0) + j;
  result.duration_minutes =
      result.applied_time +
      static_cast<double>(j) * prepared.rework_cycle_minutes(step);
  return result;
}

BatchRngs BatchRngs::from(const RngStream& parent) {
  return BatchRngs{parent.fork(0), parent.fork(1), parent.fork(2),
                   parent.fork(3), parent.fork(4)};
}

BatchRecord run_batch(const PreparedProgram& prepared, const PolicySpec& policy,
                      double cv_min_energy, double sigma_curing,
                      double sigma_humidity, long pallets,
                      double loading_mean_min_per_pallet, double loading_cv,
                      BatchRngs& rngs) {
  if (pallets < 1) {
    throw std::invalid_argument("run_batch: pallets must be >= 1");
  }
  const HeatTreatmentProgram& prog = prepared.program();

  const LogNormalMeanCV handling(loading_mean_min_per_pallet, loading_cv);
  const LogNormalMeanCV phi_c(prog.expected_min_energy_curing, cv_min_energy);
  const LogNormalMeanCV phi_h(prog.expected_min_energy_humidity, cv_min_energy);

  BatchRecord rec;
  rec.program_id = prog.program_id;
  rec.pallets = pallets;
  rec.loading_time = static_cast<double>(pallets) * handling.sample(rngs.times);

  const double draw_c = phi_c.sample(rngs.phi_curing);
  const double draw_h = phi_h.sample(rngs.phi_humidity);

  rec.curing = run_stopping_problem(prepared, StepKind::kCuring, policy, draw_c,
                                    sigma_curing, rngs.noise_curing);
  rec.humidity = run_stopping_problem(prepared, StepKind::kHumidity, policy,
                                      draw_h, sigma_humidity, rngs.noise_humidity);

  rec.unloading_time = static_cast<double>(pallets) * handling.sample(rngs.times);
  rec.total_duration = rec.loading_time + rec.curing.duration_minutes +
                       rec.humidity.duration_minutes + rec.unloading_time;
  rec.total_reported_energy =
      rec.curing.total_energy() + rec.humidity.total_energy();
  rec.inspection_count = 1 + rec.curing.rework_cycles + rec.humidity.rework_cycles;
  return rec;
}

}  // namespace sba
