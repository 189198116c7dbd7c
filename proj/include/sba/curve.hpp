#pragma once

#include <string>
#include <vector>

namespace sba {

struct CurvePoint {
  double minute;
  double kw;
};

// Piecewise-linear energy-input profile of one process step. Breakpoints
// are (minute, kW) pairs, strictly increasing in time, starting at 0.
// Beyond the last breakpoint the input rate is held at its final value,
// which makes the cumulative energy extrapolate linearly.
class EnergyCurve {
 public:
  EnergyCurve(std::vector<CurvePoint> points, std::string step_label,
              std::string program_id);

  // Reads a `minute,kw` CSV (header line required, dot decimal separator).
  static EnergyCurve from_csv(const std::string& path, std::string step_label,
                              std::string program_id);

  // Input rate in kW at the given minute (linear interpolation, flat
  // beyond the last breakpoint).
  double rate_at(double minute) const;

  // Exact integral of the rate over [0, minute], in kWh.
  double energy_to(double minute) const;

  double energy_between(double t0, double t1) const;

  const std::vector<CurvePoint>& points() const { return points_; }
  const std::string& step_label() const { return step_label_; }
  const std::string& program_id() const { return program_id_; }
  double end_minute() const { return points_.back().minute; }
  double end_rate_kw() const { return points_.back().kw; }

 private:
  std::vector<CurvePoint> points_;
  std::vector<double> prefix_kwh_;  // integral up to each breakpoint
  std::string step_label_;
  std::string program_id_;
};

// Cumulative energy per discretized iteration. cum_energy[k] is the
// trapezoidal integral of the input rate over [0, (k+1)*tau], i.e. the
// energy delivered through iterations 0..k inclusive. Beyond the measured
// range the curve continues with a constant per-iteration slope.
class CumulativeCurve {
 public:
  CumulativeCurve(double tau, std::vector<double> cum_energy,
                  double extrapolation_slope);

  double tau() const { return tau_; }
  double extrapolation_slope() const { return extrapolation_slope_; }
  long measured_iterations() const {
    return static_cast<long>(cum_energy_.size());
  }
  const std::vector<double>& values() const { return cum_energy_; }

  // Cumulative energy through iteration k (k >= 0).
  double at(long k) const;

  // Smallest k with at(k) >= target. Throws if the target is unreachable
  // (zero extrapolation slope and target above the curve plateau).
  long invert(double target) const;

 private:
  double tau_;
  std::vector<double> cum_energy_;
  double extrapolation_slope_;
};

CumulativeCurve build_cumulative(const EnergyCurve& curve, double tau);

}  // namespace sba
