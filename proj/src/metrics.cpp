#include "sba/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace sba {
namespace {

// Regularized incomplete beta via the standard continued-fraction
// expansion (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, int df) {
  const double x = static_cast<double>(df) / (df + t * t);
  const double p = 0.5 * reg_inc_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? 1.0 - p : p;
}

}  // namespace

double student_t_quantile(double p, int df) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("student_t_quantile: p must lie in (0, 1)");
  }
  if (df < 1) {
    throw std::invalid_argument("student_t_quantile: df must be >= 1");
  }
  if (p == 0.5) return 0.0;
  double lo = -1.0;
  double hi = 1.0;
  while (student_t_cdf(lo, df) > p) lo *= 2.0;
  while (student_t_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, df) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

KpiSummary aggregate(std::span<const RunRow> rows) {
  if (rows.empty()) {
    throw std::invalid_argument("aggregate: no rows");
  }
  KpiSummary s;
  const RunRow& first = rows.front();
  s.point_id = first.point_id;
  s.policy = first.policy;
  s.cv = first.cv;
  s.alpha0 = first.alpha0;
  s.beta = first.beta;
  s.main_factor = first.main_factor;
  s.rework_factor = first.rework_factor;
  s.replications = static_cast<int>(rows.size());

  double e = 0.0;
  double rw = 0.0;
  double insp = 0.0;
  for (const auto& r : rows) {
    if (r.point_id != s.point_id) {
      throw std::invalid_argument("aggregate: rows span multiple design points");
    }
    e += r.mean_energy_per_batch;
    rw += r.rework_ratio;
    insp += r.mean_inspections_per_batch;
  }
  const double n = static_cast<double>(rows.size());
  s.mean_energy_per_batch = e / n;
  s.rework_ratio = rw / n;
  s.mean_inspections_per_batch = insp / n;

  if (rows.size() >= 2) {
    double ss = 0.0;
    for (const auto& r : rows) {
      const double d = r.mean_energy_per_batch - s.mean_energy_per_batch;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    const double se = sd / std::sqrt(n);
    const int df = static_cast<int>(rows.size()) - 1;
    const double t95 = student_t_quantile(0.975, df);
    const double t99 = student_t_quantile(0.995, df);
    s.ci95 = {s.mean_energy_per_batch - t95 * se,
              s.mean_energy_per_batch + t95 * se, true};
    s.ci99 = {s.mean_energy_per_batch - t99 * se,
              s.mean_energy_per_batch + t99 * se, true};
  }
  return s;
}

Verdict compare(const KpiSummary& a, const KpiSummary& b, double alpha) {
  auto pick = [alpha](const KpiSummary& s) -> const Interval& {
    if (alpha == 0.05) return s.ci95;
    if (alpha == 0.01) return s.ci99;
    throw std::invalid_argument("compare: alpha must be 0.05 or 0.01");
  };
  const Interval& ia = pick(a);
  const Interval& ib = pick(b);
  if (!ia.defined || !ib.defined) {
    throw std::invalid_argument("compare: intervals undefined at this level");
  }
  if (ia.hi < ib.lo) return Verdict::kABetter;
  if (ib.hi < ia.lo) return Verdict::kBBetter;
  return Verdict::kIndistinguishable;
}

ParetoPoint to_costs(const KpiSummary& summary, const CostRates& rates) {
  if (rates.price_per_kwh < 0.0 || rates.wage_per_hour < 0.0 ||
      rates.minutes_per_inspection < 0.0) {
    throw std::invalid_argument("to_costs: rates must be non-negative");
  }
  ParetoPoint p;
  p.point_id = summary.point_id;
  p.energy_cost = summary.mean_energy_per_batch * rates.price_per_kwh;
  p.personnel_cost = summary.mean_inspections_per_batch *
                     (rates.minutes_per_inspection / 60.0) * rates.wage_per_hour;
  return p;
}

std::vector<ParetoPoint> pareto_front(std::vector<ParetoPoint> points) {
  auto dominates = [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.energy_cost <= b.energy_cost && a.personnel_cost <= b.personnel_cost &&
           (a.energy_cost < b.energy_cost || a.personnel_cost < b.personnel_cost);
  };
  std::vector<ParetoPoint> front;
  for (const auto& candidate : points) {
    bool dominated = false;
    for (const auto& other : points) {
      if (dominates(other, candidate)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(candidate);
  }
  std::stable_sort(front.begin(), front.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) {
                     return a.energy_cost < b.energy_cost;
                   });
  return front;
}

std::vector<KpiSummary> aggregate_store(std::span<const RunRow> rows) {
  std::map<long, std::vector<RunRow>> by_point;
  for (const auto& r : rows) by_point[r.point_id].push_back(r);
  std::vector<KpiSummary> out;
  out.reserve(by_point.size());
  for (const auto& [id, group] : by_point) out.push_back(aggregate(group));
  return out;
}

const KpiSummary& best_summary(std::span<const KpiSummary> candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("best_summary: no candidates");
  }
  const KpiSummary* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.mean_energy_per_batch < best->mean_energy_per_batch) {
      best = &c;
    } else if (c.mean_energy_per_batch == best->mean_energy_per_batch) {
      if (c.rework_factor < best->rework_factor ||
          (c.rework_factor == best->rework_factor &&
           (c.beta + c.main_factor) < (best->beta + best->main_factor))) {
        best = &c;
      }
    }
  }
  return *best;
}

}  // namespace sba
