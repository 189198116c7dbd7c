#pragma once

#include <span>
#include <vector>

#include "sba/sweep.hpp"

namespace sba {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool defined = false;

  double half_width() const { return defined ? (hi - lo) / 2.0 : 0.0; }
};

struct KpiSummary {
  long point_id = 0;
  std::string policy;
  double cv = 0.0;
  double alpha0 = 0.0;
  double beta = 0.0;
  double main_factor = 0.0;
  double rework_factor = 0.0;
  int replications = 0;
  double mean_energy_per_batch = 0.0;
  double rework_ratio = 0.0;
  double mean_inspections_per_batch = 0.0;
  Interval ci95;
  Interval ci99;
};

// Student-t quantile, P(T_df <= t) = p.
double student_t_quantile(double p, int df);

// Aggregates one design point's replication rows: replication means are
// averaged and t-intervals computed at alpha = 0.05 and 0.01. A single
// replication yields a point estimate with undefined intervals.
KpiSummary aggregate(std::span<const RunRow> rows);

enum class Verdict { kABetter, kBBetter, kIndistinguishable };

// Non-overlap criterion at the given significance level (0.05 or 0.01).
Verdict compare(const KpiSummary& a, const KpiSummary& b, double alpha);

struct CostRates {
  double price_per_kwh = 0.197;
  double wage_per_hour = 40.90;
  double minutes_per_inspection = 15.0;
};

struct ParetoPoint {
  double energy_cost = 0.0;     // currency units per batch
  double personnel_cost = 0.0;  // currency units per batch
  long point_id = 0;
};

ParetoPoint to_costs(const KpiSummary& summary, const CostRates& rates);

// Non-dominated subset; equal points are mutually non-dominating and all
// retained. Output ordered by energy cost (stable).
std::vector<ParetoPoint> pareto_front(std::vector<ParetoPoint> points);

// Groups rows by point id and aggregates each group.
std::vector<KpiSummary> aggregate_store(std::span<const RunRow> rows);

// Argmin by mean energy among the given summaries; ties broken by lower
// rework factor, then lower beta/main factor. Throws when empty.
const KpiSummary& best_summary(std::span<const KpiSummary> candidates);

}  // namespace sba
