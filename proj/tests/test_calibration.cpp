#include <cmath>
#include <string>

#include <doctest.h>

#include "sba/calibration.hpp"
#include "sba/rng.hpp"

namespace {

const std::string kDataDir = SBA_DATA_DIR;

}  // namespace

TEST_CASE("back-calculation reproduces the recorded negative-program value") {
  // planned energy 352 kWh at the (1 - 61/183) quantile with CV 0.32
  const double est = sba::estimate_expected_min_energy(352.0, 0.32, 61, 183);
  CHECK(est == doctest::Approx(308.84).epsilon(0.02));
}

TEST_CASE("back-calculation inverts its own forward model") {
  sba::RngStream rng(2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const double expected = 100.0 + 900.0 * rng.next_uniform();
    const double cv = 0.05 + 0.4 * rng.next_uniform();
    const long inspections = 50 + static_cast<long>(rng.next_uniform() * 200);
    const long reworks = 1 + static_cast<long>(
        rng.next_uniform() * static_cast<double>(inspections - 2));
    const double r =
        static_cast<double>(reworks) / static_cast<double>(inspections);
    // forward: the planned energy sits at the (1 - r) quantile
    const double planned =
        expected * (1.0 + cv * sba::normal_inverse_cdf(1.0 - r));
    if (planned <= 0.0) continue;
    const double back =
        sba::estimate_expected_min_energy(planned, cv, reworks, inspections);
    CHECK(back == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("degenerate rework ratios are rejected") {
  CHECK_THROWS(sba::estimate_expected_min_energy(352.0, 0.32, 0, 183));
  CHECK_THROWS(sba::estimate_expected_min_energy(352.0, 0.32, 183, 183));
  CHECK_THROWS(sba::estimate_expected_min_energy(352.0, 0.32, 200, 183));
  CHECK_THROWS(sba::estimate_expected_min_energy(0.0, 0.32, 61, 183));
  CHECK_THROWS(sba::estimate_expected_min_energy(352.0, 0.0, 61, 183));
  // 1 + cv * z goes non-positive when nearly everything is reworked
  CHECK_THROWS(sba::estimate_expected_min_energy(352.0, 0.5, 99999, 100000));
}

TEST_CASE("bundled inspection table loads and matches the row schema") {
  const auto rows = sba::load_inspection_table(kDataDir + "/inspection_log.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].program_id == "negative");
  CHECK(rows[0].cum_energy_maturation == 352.0);
  CHECK(rows[0].cum_energy_drying == 689.0);
  CHECK(rows[0].lead_cv == 0.32);
  CHECK(rows[0].inspections == 183);
  CHECK(rows[0].reworks == 61);
  CHECK(rows[0].company_expected_curing == 308.84);
  CHECK(rows[3].program_id == "start_stop");
  CHECK(rows[3].reworks == 0);  // no inspections recorded for this family
  // the maturation and drying estimates use the same quantile machinery
  CHECK(sba::estimate_expected_min_energy(rows[0]) ==
        doctest::Approx(308.84).epsilon(0.02));
  CHECK(sba::estimate_expected_min_energy_humidity(rows[0]) ==
        sba::estimate_expected_min_energy(689.0, 0.32, 61, 183));
}

TEST_CASE("malformed inspection tables are rejected") {
  CHECK_THROWS(sba::load_inspection_table(kDataDir + "/no_such_table.csv"));
  CHECK_THROWS(sba::load_inspection_table(kDataDir + "/scenario.json"));
}

TEST_CASE("demand shares weight plate types by probability times lot size") {
  const auto cfg = sba::load_scenario(kDataDir + "/scenario.json");
  const auto shares = sba::demand_shares(cfg);
  REQUIRE(shares.size() == 4);
  double total = 0.0;
  for (const auto& [id, s] : shares) total += s;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  // the recorded program mix: ~61/13/6/19 percent
  CHECK(shares.at("negative") == doctest::Approx(0.61).epsilon(0.04));
  CHECK(shares.at("positive") == doctest::Approx(0.13).epsilon(0.04));
  CHECK(shares.at("positive_vap") == doctest::Approx(0.06).epsilon(0.05));
  CHECK(shares.at("start_stop") == doctest::Approx(0.19).epsilon(0.04));
}

TEST_CASE("weighted baseline blends rows by demand share") {
  std::vector<sba::InspectionRow> rows(2);
  rows[0].program_id = "a";
  rows[0].lead_cv = 0.2;
  rows[0].cum_energy_maturation = 120.0;
  rows[0].company_expected_curing = 100.0;
  rows[1].program_id = "b";
  rows[1].lead_cv = 0.4;
  rows[1].cum_energy_maturation = 150.0;
  rows[1].company_expected_curing = 100.0;
  const std::map<std::string, double> shares{{"a", 0.75}, {"b", 0.25}};
  const auto params = sba::weighted_baseline(rows, shares);
  CHECK(params.weighted_cv == doctest::Approx(0.75 * 0.2 + 0.25 * 0.4));
  CHECK(params.weighted_factor == doctest::Approx(0.75 * 1.2 + 0.25 * 1.5));
  const std::map<std::string, double> bad{{"a", 0.7}, {"b", 0.2}};
  CHECK_THROWS(sba::weighted_baseline(rows, bad));
  const std::map<std::string, double> missing{{"a", 1.0}};
  CHECK_THROWS(sba::weighted_baseline(rows, missing));
}
