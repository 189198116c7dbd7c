#include "sba/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sba {

void SbaConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("SbaConfig: beta must lie in (0, 1)");
  }
  if (alpha_floor < 0.0 || alpha_floor > alpha0) {
    throw std::invalid_argument("SbaConfig: need 0 <= alpha_floor <= alpha0");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("SbaConfig: tau must be > 0");
  }
  if (sigma_estimate < 0.0) {
    throw std::invalid_argument("SbaConfig: sigma_estimate must be >= 0");
  }
  if (!(expected_min_energy > 0.0)) {
    throw std::invalid_argument("SbaConfig: expected_min_energy must be > 0");
  }
}

PolicySpec PolicySpec::sba(double beta, double alpha0, double alpha_floor) {
  PolicySpec p;
  p.kind = PolicyKind::kSba;
  p.beta = beta;
  p.alpha0 = alpha0;
  p.alpha_floor = alpha_floor;
  return p;
}

PolicySpec PolicySpec::opt(double factor) {
  PolicySpec p;
  p.kind = PolicyKind::kOpt;
  p.factor = factor;
  return p;
}

PolicySpec PolicySpec::baseline() {
  PolicySpec p;
  p.kind = PolicyKind::kBaseline;
  p.factor = 1.2;
  return p;
}

PolicySpec PolicySpec::ideal() {
  PolicySpec p;
  p.kind = PolicyKind::kIdeal;
  return p;
}

double PolicySpec::effective_factor() const {
  return kind == PolicyKind::kBaseline ? 1.2 : factor;
}

void PolicySpec::validate() const {
  switch (kind) {
    case PolicyKind::kOpt:
      if (!(factor > 0.0)) {
        throw std::invalid_argument("PolicySpec: OPT factor must be > 0");
      }
      break;
    case PolicyKind::kSba:
      if (!(beta > 0.0 && beta < 1.0)) {
        throw std::invalid_argument("PolicySpec: beta must lie in (0, 1)");
      }
      if (alpha_floor < 0.0 || alpha_floor > alpha0) {
        throw std::invalid_argument("PolicySpec: need 0 <= alpha_floor <= alpha0");
      }
      break;
    default:
      break;
  }
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kSba: return "SBA";
    case PolicyKind::kOpt: return "OPT";
    case PolicyKind::kBaseline: return "Baseline";
    case PolicyKind::kIdeal: return "Ideal";
  }
  return "?";
}

StoppingState init_state(const SbaConfig& cfg, const CumulativeCurve& curve,
                         double phi_draw) {
  cfg.validate();
  if (!(phi_draw > 0.0)) {
    throw std::invalid_argument("init_state: phi_draw must be > 0");
  }
  StoppingState s;
  s.n = 0;
  s.cum_energy = 0.0;
  s.hidden_min_energy = phi_draw;
  s.sensor_reading = cfg.expected_min_energy;
  s.deviation = phi_draw - s.sensor_reading;
  s.estimate = cfg.expected_min_energy;
  s.threshold = normal_inverse_cdf(cfg.beta, s.estimate, cfg.sigma_estimate);
  // a non-positive threshold is already satisfied before the first
  // iteration; clamp so the inversion yields the immediate-stop index
  const long k0 = curve.invert(std::max(0.0, s.threshold));
  s.remaining_time = static_cast<double>(k0) * cfg.tau;
  s.action = Action::kContinue;
  return s;
}

double distortion_at(long n, const SbaConfig& cfg, long L) {
  if (n < 0 || L <= 0) {
    throw std::invalid_argument("distortion_at: need n >= 0 and L > 0");
  }
  const double slope = (cfg.alpha0 - cfg.alpha_floor) / static_cast<double>(L);
  return std::max(cfg.alpha_floor, cfg.alpha0 - slope * static_cast<double>(n));
}

double sensor_step(const StoppingState& state, const SbaConfig& cfg, long L,
                   RngStream& rng) {
  if (state.action != Action::kContinue) {
    throw std::logic_error("sensor_step: state already terminated");
  }
  const double cv = distortion_at(state.n, cfg, L);
  // sd scales with signal magnitude; |.| keeps it non-negative for the
  // (vanishingly rare) negative reading
  const double sd = cv * std::fabs(state.sensor_reading);
  const double eta = rng.next_normal(state.deviation, sd);
  return state.sensor_reading + eta;
}

double bayes_update(double prior, double reading) {
  return (prior + reading) / 2.0;
}

double threshold(double estimate, double beta, double sigma) {
  return normal_inverse_cdf(beta, estimate, sigma);
}

double remaining_time(long K, long n_next, double tau) {
  return static_cast<double>(K - n_next) * tau;
}

SbaRunResult sba_run(const SbaConfig& cfg, const CumulativeCurve& curve,
                     double phi_draw, RngStream& rng, long hard_cap) {
  cfg.validate();
  const long L = curve.invert(cfg.expected_min_energy);
  const long cap = (hard_cap > 0) ? hard_cap : 10 * std::max<long>(L, 1);

  SbaRunResult result;
  result.trace.push_back(init_state(cfg, curve, phi_draw));

  for (;;) {
    const StoppingState& cur = result.trace.back();
    const long n_next = cur.n + 1;
    if (n_next > cap) {
      throw std::runtime_error(
          "sba_run: iteration cap exceeded without termination");
    }
    StoppingState next;
    next.n = n_next;
    next.hidden_min_energy = phi_draw;
    next.sensor_reading = sensor_step(cur, cfg, std::max<long>(L, 1), rng);
    next.deviation = phi_draw - next.sensor_reading;
    next.estimate = bayes_update(cur.estimate, next.sensor_reading);
    next.threshold = threshold(next.estimate, cfg.beta, cfg.sigma_estimate);
    const long k = curve.invert(std::max(0.0, next.threshold));
    next.remaining_time = remaining_time(k, n_next, cfg.tau);
    next.cum_energy = curve.at(n_next);
    next.action =
        (next.remaining_time <= 0.0) ? Action::kTerminate : Action::kContinue;
    result.trace.push_back(next);
    if (next.action == Action::kTerminate) {
      result.stopping_iteration = n_next;
      break;
    }
  }
  return result;
}

long fixed_iterations(const CumulativeCurve& curve, double factor,
                      double expected_min_energy) {
  if (!(factor > 0.0)) {
    throw std::invalid_argument("fixed_iterations: factor must be > 0");
  }
  return curve.invert(factor * expected_min_energy);
}

long ideal_iterations(const CumulativeCurve& curve, double phi_draw) {
  if (!(phi_draw > 0.0)) {
    throw std::invalid_argument("ideal_iterations: phi_draw must be > 0");
  }
  return curve.invert(phi_draw);
}

}  // namespace sba
