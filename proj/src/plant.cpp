#include "sba/plant.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "json.hpp"

namespace sba {

const HeatTreatmentProgram& ScenarioConfig::program(const std::string& id) const {
  for (const auto& p : programs) {
    if (p.program_id == id) return p;
  }
  throw std::invalid_argument("ScenarioConfig: unknown program `" + id + "`");
}

void ScenarioConfig::validate() const {
  if (chamber_capacity <= 0) {
    throw std::invalid_argument("scenario: chamber capacity must be > 0");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("scenario: tau must be > 0");
  }
  if (warmup_years < 0 || warmup_years >= horizon_years) {
    throw std::invalid_argument("scenario: need 0 <= warmup_years < horizon_years");
  }
  if (!(interarrival_mean_days > 0.0) || interarrival_cv < 0.0) {
    throw std::invalid_argument("scenario: invalid inter-arrival parameters");
  }
  if (cv_min_energy < 0.0) {
    throw std::invalid_argument("scenario: cv_min_energy must be >= 0");
  }
  if (plate_types.empty()) {
    throw std::invalid_argument("scenario: plate_types must be non-empty");
  }
  double psum = 0.0;
  for (const auto& t : plate_types) {
    if (t.probability < 0.0 || !(t.lot_mean > 0.0) || t.lot_cv < 0.0) {
      throw std::invalid_argument("scenario: invalid plate type " +
                                  std::to_string(t.type_id));
    }
    program(t.program_id);  // throws on unknown id
    psum += t.probability;
  }
  if (std::fabs(psum - 1.0) > 1e-9) {
    throw std::invalid_argument("scenario: plate-type probabilities sum to " +
                                std::to_string(psum) + ", expected 1");
  }
  for (const auto& p : programs) p.validate();
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  nlohmann::json j;
  in >> j;
  const auto dir = std::filesystem::path(path).parent_path();

  ScenarioConfig cfg;
  const auto& prod = j.at("production");
  cfg.interarrival_mean_days = prod.at("interarrival_mean_working_days");
  cfg.interarrival_cv = prod.at("interarrival_cv");
  cfg.preproduction_mean_days = prod.value("preproduction_mean_working_days", 1.0);
  cfg.preproduction_cv = prod.value("preproduction_cv", 0.5);

  const auto& chamber = j.at("chamber");
  cfg.chamber_capacity = chamber.at("capacity_pallets");
  cfg.loading_mean_min_per_pallet = chamber.at("loading_mean_min_per_pallet");
  cfg.loading_cv = chamber.at("loading_cv");

  const auto& sim = j.at("simulation");
  cfg.tau = sim.at("tau_minutes");
  cfg.minutes_per_working_day = sim.value("minutes_per_working_day", 1440.0);
  cfg.working_days_per_year = sim.value("working_days_per_year", 260.0);
  cfg.horizon_years = sim.at("horizon_years");
  cfg.warmup_years = sim.at("warmup_years");
  cfg.cv_min_energy = sim.at("cv_min_energy");

  for (const auto& pj : j.at("programs")) {
    const std::string id = pj.at("id");
    const auto mat_path = dir / std::string(pj.at("maturation_curve"));
    const auto dry_path = dir / std::string(pj.at("drying_curve"));
    HeatTreatmentProgram prog{
        id,
        EnergyCurve::from_csv(mat_path.string(), "maturation", id),
        EnergyCurve::from_csv(dry_path.string(), "drying", id),
        pj.at("expected_min_energy_curing"),
        pj.at("expected_min_energy_humidity"),
        pj.value("rewarm_energy", 0.0),
        60.0,
        pj.value("rework_factor", 0.2)};
    cfg.programs.push_back(std::move(prog));
  }

  for (const auto& tj : j.at("production").at("plate_types")) {
    cfg.plate_types.push_back(PlateType{tj.at("type_id"), tj.at("probability"),
                                        tj.at("lot_mean"), tj.at("lot_cv"),
                                        tj.at("program")});
  }
  cfg.validate();
  return cfg;
}

std::vector<ProductionOrder> generate_orders(const ScenarioConfig& cfg,
                                             RngStream& rng) {
  cfg.validate();
  const LogNormalMeanCV interarrival(
      cfg.interarrival_mean_days * cfg.minutes_per_working_day,
      cfg.interarrival_cv);
  const LogNormalMeanCV preprod(
      cfg.preproduction_mean_days * cfg.minutes_per_working_day,
      cfg.preproduction_cv);

  std::vector<double> cum_prob;
  cum_prob.reserve(cfg.plate_types.size());
  double acc = 0.0;
  for (const auto& t : cfg.plate_types) {
    acc += t.probability;
    cum_prob.push_back(acc);
  }
  cum_prob.back() = 1.0;  // absorb rounding

  std::vector<ProductionOrder> orders;
  double t = 0.0;
  long id = 0;
  for (;;) {
    t += interarrival.sample(rng);
    if (t >= cfg.horizon_minutes()) break;
    const double u = rng.next_uniform();
    const std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(cum_prob.begin(), cum_prob.end(), u) - cum_prob.begin());
    const PlateType& type = cfg.plate_types[idx];
    const LogNormalMeanCV lot(type.lot_mean, type.lot_cv);
    const long lot_size =
        std::max<long>(1, static_cast<long>(std::llround(lot.sample(rng))));
    ProductionOrder order;
    order.order_id = id++;
    order.type_id = type.type_id;
    order.program_id = type.program_id;
    order.lot_size = lot_size;
    order.arrival_time = t;
    order.ready_time = t + preprod.sample(rng);
    orders.push_back(order);
  }
  return orders;
}

std::vector<long> split_into_batches(long lot_size, int capacity) {
  if (capacity <= 0) {
    throw std::invalid_argument("split_into_batches: capacity must be > 0");
  }
  std::vector<long> batches;
  long remaining = lot_size;
  while (remaining > capacity) {
    batches.push_back(capacity);
    remaining -= capacity;
  }
  if (remaining > 0) batches.push_back(remaining);
  return batches;
}

double sigma_from_warmup(std::span<const BatchRecord> records, StepKind step,
                         double fallback, bool* fell_back) {
  if (fell_back != nullptr) *fell_back = false;
  if (records.size() < 2) {
    if (fell_back != nullptr) *fell_back = true;
    return fallback;
  }
  double sum = 0.0;
  for (const auto& r : records) {
    sum += (step == StepKind::kCuring ? r.curing : r.humidity).terminal_estimate;
  }
  const double mean = sum / static_cast<double>(records.size());
  double ss = 0.0;
  for (const auto& r : records) {
    const double v =
        (step == StepKind::kCuring ? r.curing : r.humidity).terminal_estimate;
    ss += (v - mean) * (v - mean);
  }
  return std::sqrt(ss / static_cast<double>(records.size() - 1));
}

namespace {

struct SigmaPair {
  double curing = 0.0;
  double humidity = 0.0;
};

}  // namespace

std::vector<BatchRecord> simulate(const ScenarioConfig& cfg,
                                  const PolicySpec& policy,
                                  const RngStream& root) {
  cfg.validate();
  policy.validate();

  std::map<std::string, PreparedProgram> prepared;
  std::map<std::string, SigmaPair> sigma;   // current sigma per program
  std::map<std::string, SigmaPair> seeds;   // warm-up seed values
  for (const auto& p : cfg.programs) {
    prepared.emplace(p.program_id, PreparedProgram(p, cfg.tau));
    const SigmaPair seed{cfg.cv_min_energy * p.expected_min_energy_curing,
                         cfg.cv_min_energy * p.expected_min_energy_humidity};
    seeds[p.program_id] = seed;
    sigma[p.program_id] = seed;
  }

  RngStream order_rng = root.fork(0);
  const std::vector<ProductionOrder> orders = generate_orders(cfg, order_rng);

  const double warmup_end = cfg.warmup_end_minutes();
  const double horizon_end = cfg.horizon_minutes();

  std::vector<BatchRecord> records;
  double chamber_free = 0.0;
  long batch_counter = 0;
  bool sigma_estimated = false;

  for (const auto& order : orders) {
    const std::vector<long> batches =
        split_into_batches(order.lot_size, cfg.chamber_capacity);
    long batch_index = 0;
    for (long pallets : batches) {
      const double start = std::max(chamber_free, order.ready_time);
      if (start >= horizon_end) break;

      if (policy.kind == PolicyKind::kSba && !sigma_estimated &&
          start >= warmup_end) {
        // Replace the seed sigmas with warm-up statistics, per program
        // and per step.
        for (const auto& p : cfg.programs) {
          std::vector<BatchRecord> subset;
          for (const auto& r : records) {
            if (r.in_warmup && r.program_id == p.program_id) subset.push_back(r);
          }
          bool fb_c = false;
          bool fb_h = false;
          const SigmaPair seed = seeds[p.program_id];
          sigma[p.program_id] = SigmaPair{
              sigma_from_warmup(subset, StepKind::kCuring, seed.curing, &fb_c),
              sigma_from_warmup(subset, StepKind::kHumidity, seed.humidity, &fb_h)};
          if (fb_c || fb_h) {
            std::cerr << "warning: program " << p.program_id
                      << ": fewer than 2 warm-up batches, keeping seed sigma\n";
          }
        }
        sigma_estimated = true;
      }

      const PreparedProgram& prog = prepared.at(order.program_id);
      const SigmaPair s =
          (start < warmup_end) ? seeds[order.program_id] : sigma[order.program_id];
      BatchRngs rngs = BatchRngs::from(root.fork(1 + batch_counter));
      BatchRecord rec = run_batch(prog, policy, cfg.cv_min_energy, s.curing,
                                  s.humidity, pallets,
                                  cfg.loading_mean_min_per_pallet,
                                  cfg.loading_cv, rngs);
      rec.order_id = order.order_id;
      rec.batch_id = batch_index++;
      rec.completed_at = start + rec.total_duration;
      rec.in_warmup = rec.completed_at <= warmup_end;
      chamber_free = rec.completed_at;
      records.push_back(std::move(rec));
      ++batch_counter;
    }
  }
  return records;
}

}  // namespace sba
