#include "sba/calibration.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sba/rng.hpp"

namespace sba {

double estimate_expected_min_energy(double cum_energy_at_planned, double lead_cv,
                                    long reworks, long inspections) {
  if (!(cum_energy_at_planned > 0.0)) {
    throw std::invalid_argument("estimate: cumulative energy must be > 0");
  }
  if (!(lead_cv > 0.0)) {
    throw std::invalid_argument("estimate: lead_cv must be > 0");
  }
  if (reworks <= 0 || reworks >= inspections) {
    throw std::invalid_argument(
        "estimate: rework ratio must lie strictly between 0 and 1");
  }
  const double r =
      static_cast<double>(reworks) / static_cast<double>(inspections);
  const double z = normal_inverse_cdf(1.0 - r);
  const double denom = 1.0 + lead_cv * z;
  if (denom <= 0.0) {
    throw std::runtime_error("estimate: 1 + cv * z is non-positive");
  }
  return cum_energy_at_planned / denom;
}

double estimate_expected_min_energy(const InspectionRow& row) {
  return estimate_expected_min_energy(row.cum_energy_maturation, row.lead_cv,
                                      row.reworks, row.inspections);
}

double estimate_expected_min_energy_humidity(const InspectionRow& row) {
  return estimate_expected_min_energy(row.cum_energy_drying, row.lead_cv,
                                      row.reworks, row.inspections);
}

std::map<std::string, double> demand_shares(const ScenarioConfig& scenario) {
  scenario.validate();
  std::map<std::string, double> shares;
  double total = 0.0;
  for (const auto& t : scenario.plate_types) {
    const double w = t.probability * t.lot_mean;
    shares[t.program_id] += w;
    total += w;
  }
  for (auto& [id, w] : shares) w /= total;
  return shares;
}

BaselineParams weighted_baseline(const std::vector<InspectionRow>& rows,
                                 const std::map<std::string, double>& shares) {
  double share_sum = 0.0;
  for (const auto& [id, s] : shares) share_sum += s;
  if (std::fabs(share_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("weighted_baseline: shares must sum to 1");
  }
  BaselineParams params;
  for (const auto& row : rows) {
    const auto it = shares.find(row.program_id);
    if (it == shares.end()) {
      throw std::invalid_argument("weighted_baseline: no share for program " +
                                  row.program_id);
    }
    if (!(row.company_expected_curing > 0.0)) {
      throw std::invalid_argument("weighted_baseline: missing expected energy for " +
                                  row.program_id);
    }
    const double ratio = row.cum_energy_maturation / row.company_expected_curing;
    params.weighted_cv += it->second * row.lead_cv;
    params.weighted_factor += it->second * ratio;
  }
  return params;
}

std::vector<InspectionRow> load_inspection_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open inspection table: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty inspection table: " + path);
  }
  const std::string expected =
      "program,planned_maturation_h,cum_energy_maturation_kwh,planned_drying_h,"
      "cum_energy_drying_kwh,lead_cv,inspections,reworks,"
      "expected_min_energy_curing_kwh,expected_min_energy_humidity_kwh";
  if (line != expected) {
    throw std::runtime_error("inspection table: unexpected header: " + line);
  }
  std::vector<InspectionRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> f;
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 10) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 10 fields");
    }
    InspectionRow row;
    row.program_id = f[0];
    row.planned_time_maturation_h = std::stod(f[1]);
    row.cum_energy_maturation = std::stod(f[2]);
    row.planned_time_drying_h = std::stod(f[3]);
    row.cum_energy_drying = std::stod(f[4]);
    row.lead_cv = std::stod(f[5]);
    row.inspections = std::stol(f[6]);
    row.reworks = std::stol(f[7]);
    row.company_expected_curing = std::stod(f[8]);
    row.company_expected_humidity = std::stod(f[9]);
    if (row.reworks < 0 || row.reworks > row.inspections) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": reworks outside [0, inspections]");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sba
