#include "sba/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sba {

EnergyCurve::EnergyCurve(std::vector<CurvePoint> points, std::string step_label,
                         std::string program_id)
    : points_(std::move(points)),
      step_label_(std::move(step_label)),
      program_id_(std::move(program_id)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("EnergyCurve: at least 2 breakpoints required");
  }
  if (points_.front().minute != 0.0) {
    throw std::invalid_argument("EnergyCurve: first breakpoint must be at minute 0");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].kw < 0.0) {
      throw std::invalid_argument("EnergyCurve: negative input rate at breakpoint " +
                                  std::to_string(i));
    }
    if (i > 0 && !(points_[i].minute > points_[i - 1].minute)) {
      throw std::invalid_argument(
          "EnergyCurve: breakpoint times must be strictly increasing (index " +
          std::to_string(i) + ")");
    }
  }
  prefix_kwh_.resize(points_.size());
  prefix_kwh_[0] = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double dt = points_[i].minute - points_[i - 1].minute;
    prefix_kwh_[i] =
        prefix_kwh_[i - 1] + 0.5 * (points_[i].kw + points_[i - 1].kw) * dt / 60.0;
  }
}

EnergyCurve EnergyCurve::from_csv(const std::string& path, std::string step_label,
                                  std::string program_id) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open curve file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty curve file: " + path);
  }
  // header line `minute,kw`
  std::vector<CurvePoint> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected `minute,kw`");
    }
    pts.push_back({std::stod(a), std::stod(b)});
  }
  return EnergyCurve(std::move(pts), std::move(step_label), std::move(program_id));
}

double EnergyCurve::rate_at(double minute) const {
  if (minute <= 0.0) return points_.front().kw;
  if (minute >= points_.back().minute) return points_.back().kw;
  auto it = std::upper_bound(
      points_.begin(), points_.end(), minute,
      [](double t, const CurvePoint& p) { return t < p.minute; });
  const CurvePoint& hi = *it;
  const CurvePoint& lo = *(it - 1);
  const double f = (minute - lo.minute) / (hi.minute - lo.minute);
  return lo.kw + f * (hi.kw - lo.kw);
}

double EnergyCurve::energy_to(double minute) const {
  if (minute <= 0.0) return 0.0;
  if (minute >= points_.back().minute) {
    return prefix_kwh_.back() +
           points_.back().kw * (minute - points_.back().minute) / 60.0;
  }
  auto it = std::upper_bound(
      points_.begin(), points_.end(), minute,
      [](double t, const CurvePoint& p) { return t < p.minute; });
  const std::size_t i = static_cast<std::size_t>(it - points_.begin());
  const CurvePoint& lo = points_[i - 1];
  const double dt = minute - lo.minute;
  const double r = rate_at(minute);
  return prefix_kwh_[i - 1] + 0.5 * (lo.kw + r) * dt / 60.0;
}

double EnergyCurve::energy_between(double t0, double t1) const {
  return energy_to(t1) - energy_to(t0);
}

CumulativeCurve::CumulativeCurve(double tau, std::vector<double> cum_energy,
                                 double extrapolation_slope)
    : tau_(tau),
      cum_energy_(std::move(cum_energy)),
      extrapolation_slope_(extrapolation_slope) {
  if (!(tau_ > 0.0)) {
    throw std::invalid_argument("CumulativeCurve: tau must be > 0");
  }
  if (cum_energy_.empty()) {
    throw std::invalid_argument("CumulativeCurve: cum_energy must be non-empty");
  }
  if (extrapolation_slope_ < 0.0) {
    throw std::invalid_argument("CumulativeCurve: extrapolation slope must be >= 0");
  }
  for (std::size_t i = 1; i < cum_energy_.size(); ++i) {
    if (cum_energy_[i] < cum_energy_[i - 1]) {
      throw std::invalid_argument("CumulativeCurve: cum_energy must be non-decreasing");
    }
  }
}

double CumulativeCurve::at(long k) const {
  if (k < 0) {
    throw std::invalid_argument("CumulativeCurve::at: negative iteration");
  }
  const long m = measured_iterations() - 1;
  if (k <= m) return cum_energy_[static_cast<std::size_t>(k)];
  return cum_energy_.back() + static_cast<double>(k - m) * extrapolation_slope_;
}

long CumulativeCurve::invert(double target) const {
  if (target < 0.0) {
    throw std::invalid_argument("CumulativeCurve::invert: negative target");
  }
  if (target <= cum_energy_.front()) return 0;
  if (target <= cum_energy_.back()) {
    auto it = std::lower_bound(cum_energy_.begin(), cum_energy_.end(), target);
    return static_cast<long>(it - cum_energy_.begin());
  }
  if (extrapolation_slope_ <= 0.0) {
    throw std::runtime_error(
        "CumulativeCurve::invert: target above curve plateau with zero slope");
  }
  const long m = measured_iterations() - 1;
  long k = m + static_cast<long>(
                   std::ceil((target - cum_energy_.back()) / extrapolation_slope_));
  // guard against floating-point slack around the ceiling
  while (k > 0 && at(k - 1) >= target) --k;
  while (at(k) < target) ++k;
  return k;
}

CumulativeCurve build_cumulative(const EnergyCurve& curve, double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("build_cumulative: tau must be > 0");
  }
  const long n_measured =
      std::max<long>(1, static_cast<long>(std::ceil(curve.end_minute() / tau)));
  std::vector<double> cum(static_cast<std::size_t>(n_measured));
  for (long k = 0; k < n_measured; ++k) {
    cum[static_cast<std::size_t>(k)] =
        curve.energy_to(static_cast<double>(k + 1) * tau);
  }
  const double slope = curve.end_rate_kw() * tau / 60.0;
  return CumulativeCurve(tau, std::move(cum), slope);
}

}  // namespace sba
