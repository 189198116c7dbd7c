#pragma once

#include <vector>

#include "sba/curve.hpp"
#include "sba/rng.hpp"

namespace sba {

enum class Action { kContinue, kTerminate };

// Markov state of the sensor-driven stopping loop at iteration n.
struct StoppingState {
  long n = 0;
  double cum_energy = 0.0;         // energy delivered through iteration n
  double hidden_min_energy = 0.0;  // true, hidden requirement
  double sensor_reading = 0.0;
  double deviation = 0.0;          // hidden_min_energy - sensor_reading
  double estimate = 0.0;           // Bayesian estimate
  double threshold = 0.0;          // energy-safety threshold
  double remaining_time = 0.0;     // minutes; <= 0 signals termination
  Action action = Action::kContinue;
};

struct SbaConfig {
  double beta = 0.95;            // energy-safety quantile
  double alpha0 = 0.2;           // initial sensor distortion (CV)
  double alpha_floor = 0.02;     // distortion floor
  double tau = 10.0;             // minutes per iteration
  double sigma_estimate = 0.0;   // long-term SD of the Bayesian estimate
  double expected_min_energy = 0.0;
  double cv_min_energy = 0.0;

  void validate() const;
};

enum class PolicyKind { kSba, kOpt, kBaseline, kIdeal };

// Baseline is the fixed-time policy at factor 1.2.
struct PolicySpec {
  PolicyKind kind = PolicyKind::kIdeal;
  double factor = 1.0;       // OPT main-step processing-energy factor
  double beta = 0.95;        // SBA
  double alpha0 = 0.2;       // SBA
  double alpha_floor = 0.02; // SBA

  static PolicySpec sba(double beta, double alpha0, double alpha_floor = 0.02);
  static PolicySpec opt(double factor);
  static PolicySpec baseline();
  static PolicySpec ideal();

  double effective_factor() const;  // OPT factor; 1.2 for Baseline
  void validate() const;
};

const char* to_string(PolicyKind kind);

StoppingState init_state(const SbaConfig& cfg, const CumulativeCurve& curve,
                         double phi_draw);

// Linearly declining sensor distortion, clamped at the floor once the
// expected-energy iteration count L has been reached.
double distortion_at(long n, const SbaConfig& cfg, long L);

// Draws the next sensor reading given the current state.
double sensor_step(const StoppingState& state, const SbaConfig& cfg, long L,
                   RngStream& rng);

double bayes_update(double prior, double reading);

double threshold(double estimate, double beta, double sigma);

double remaining_time(long K, long n_next, double tau);

struct SbaRunResult {
  long stopping_iteration = 0;
  std::vector<StoppingState> trace;  // N + 1 entries
};

// Full sensor-driven stopping loop. hard_cap = 0 selects the default of
// 10 * L; exceeding the cap raises an error instead of looping forever.
SbaRunResult sba_run(const SbaConfig& cfg, const CumulativeCurve& curve,
                     double phi_draw, RngStream& rng, long hard_cap = 0);

long fixed_iterations(const CumulativeCurve& curve, double factor,
                      double expected_min_energy);

long ideal_iterations(const CumulativeCurve& curve, double phi_draw);

}  // namespace sba
