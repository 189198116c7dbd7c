#pragma once

#include <map>
#include <string>
#include <vector>

#include "sba/plant.hpp"

namespace sba {

// One row of the company's inspection statistics used for back-
// calculating expected minimum energies.
struct InspectionRow {
  std::string program_id;
  double planned_time_maturation_h = 0.0;
  double cum_energy_maturation = 0.0;  // kWh at the planned maturation time
  double planned_time_drying_h = 0.0;
  double cum_energy_drying = 0.0;  // kWh at the planned drying time
  double lead_cv = 0.0;            // CV of the metallic-lead measurements
  long inspections = 0;
  long reworks = 0;
  // Company-reported expected minimum energies (used as simulation
  // defaults and for the provided/required ratios).
  double company_expected_curing = 0.0;
  double company_expected_humidity = 0.0;
};

// Back-calculates E[Phi] from the rework percentile: the planned energy
// sits at the (1 - reworks/inspections) quantile of a Gaussian with mean
// E[Phi] and sd lead_cv * E[Phi].
double estimate_expected_min_energy(double cum_energy_at_planned, double lead_cv,
                                    long reworks, long inspections);

double estimate_expected_min_energy(const InspectionRow& row);  // maturation

// Same quantile logic applied to the drying energy.
double estimate_expected_min_energy_humidity(const InspectionRow& row);

// Per-program demand shares: sum over plate types of probability times
// mean lot size, normalized to 1.
std::map<std::string, double> demand_shares(const ScenarioConfig& scenario);

struct BaselineParams {
  double weighted_cv = 0.0;
  double weighted_factor = 0.0;  // provided / required energy ratio
};

BaselineParams weighted_baseline(const std::vector<InspectionRow>& rows,
                                 const std::map<std::string, double>& shares);

std::vector<InspectionRow> load_inspection_table(const std::string& path);

}  // namespace sba
