// Command-line front end: validate, simulate, sweep, analyze, pareto,
// calibrate, trace. All outputs are delimited text with schema headers
// and embedded provenance comments.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sba/calibration.hpp"
#include "sba/chamber.hpp"
#include "sba/metrics.hpp"
#include "sba/plant.hpp"
#include "sba/provenance.hpp"
#include "sba/sweep.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitPartialSweep = 4;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

void write_lines(const std::string& path,
                 const std::vector<std::string>& lines) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    for (const auto& line : lines) out << line << '\n';
  }
  fs::rename(tmp, target);
}

std::vector<std::string> provenance_comments(
    const std::map<std::string, std::string>& fields) {
  std::vector<std::string> out;
  out.push_back(std::string("# version=") + sba::kArtifactVersion);
  for (const auto& [k, v] : fields) out.push_back("# " + k + "=" + v);
  return out;
}

sba::PolicySpec make_policy(const std::string& name, double factor, double beta,
                            double alpha0, double alpha_floor) {
  if (name == "sba") return sba::PolicySpec::sba(beta, alpha0, alpha_floor);
  if (name == "opt") return sba::PolicySpec::opt(factor);
  if (name == "baseline") return sba::PolicySpec::baseline();
  if (name == "ideal") return sba::PolicySpec::ideal();
  throw std::invalid_argument("unknown policy: " + name);
}

void emit_batches(const std::string& path,
                  const std::vector<sba::BatchRecord>& records,
                  const std::map<std::string, std::string>& provenance) {
  std::vector<std::string> lines = provenance_comments(provenance);
  lines.push_back(
      "order_id,batch_id,program,pallets,in_warmup,completed_at_min,"
      "total_duration_min,total_energy_kwh,inspection_count,"
      "curing_iterations,curing_rework_cycles,curing_energy_kwh,"
      "humidity_iterations,humidity_rework_cycles,humidity_energy_kwh");
  for (const auto& r : records) {
    std::ostringstream os;
    os << r.order_id << ',' << r.batch_id << ',' << r.program_id << ','
       << r.pallets << ',' << (r.in_warmup ? 1 : 0) << ','
       << fmt(r.completed_at) << ',' << fmt(r.total_duration) << ','
       << fmt(r.total_reported_energy) << ',' << r.inspection_count << ','
       << r.curing.stopping_iteration << ',' << r.curing.rework_cycles << ','
       << fmt(r.curing.total_energy()) << ',' << r.humidity.stopping_iteration
       << ',' << r.humidity.rework_cycles << ','
       << fmt(r.humidity.total_energy());
    lines.push_back(os.str());
  }
  write_lines(path, lines);
}

int cmd_validate(const std::string& scenario_path,
                 const std::string& grid_path) {
  const sba::ScenarioConfig scenario = sba::load_scenario(scenario_path);
  scenario.validate();
  std::cout << "scenario ok: " << scenario_path << " ("
            << scenario.plate_types.size() << " plate types, "
            << scenario.programs.size() << " programs)\n";
  if (!grid_path.empty()) {
    const sba::DesignGrid grid = sba::load_grid(grid_path);
    grid.validate();
    std::cout << "grid ok: " << grid_path << " ("
              << sba::enumerate_grid(grid).size() << " design points, "
              << grid.replications << " replications)\n";
  }
  return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const sba::PolicySpec& policy, std::uint64_t seed) {
  const sba::ScenarioConfig scenario = sba::load_scenario(scenario_path);
  const sba::RngStream root(seed, 0);
  const auto records = sba::simulate(scenario, policy, root);
  std::map<std::string, std::string> prov{
      {"scenario_digest", sba::file_digest(scenario_path)},
      {"seed", std::to_string(seed)},
      {"policy", sba::to_string(policy.kind)},
  };
  emit_batches((fs::path(out_dir) / "batches.csv").string(), records, prov);
  long post = 0;
  double energy = 0.0;
  for (const auto& r : records) {
    if (r.in_warmup) continue;
    ++post;
    energy += r.total_reported_energy;
  }
  std::cout << "simulated " << records.size() << " batches (" << post
            << " post-warm-up); mean energy/batch "
            << (post > 0 ? energy / post : 0.0) << " kWh\n";
  return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& grid_path,
              const std::string& out_dir, int parallelism) {
  const sba::ScenarioConfig scenario = sba::load_scenario(scenario_path);
  const sba::DesignGrid grid = sba::load_grid(grid_path);
  sba::SweepOptions options;
  options.parallelism = parallelism;
  options.output_dir = out_dir;
  options.scenario_digest = sba::file_digest(scenario_path);
  options.grid_digest = sba::file_digest(grid_path);
  const auto outcome = sba::run_sweep(grid, scenario, options);
  std::cout << "sweep: " << outcome.executed << " executed, "
            << outcome.skipped << " skipped, " << outcome.failed
            << " failed\n";
  return outcome.failed > 0 ? kExitPartialSweep : kExitOk;
}

int cmd_analyze(const std::string& results_path, const std::string& out_dir) {
  const auto rows = sba::read_store(results_path);
  const auto summaries = sba::aggregate_store(rows);
  std::map<std::string, std::string> prov{
      {"results_digest", sba::file_digest(results_path)}};
  std::vector<std::string> lines = provenance_comments(prov);
  lines.push_back(
      "point_id,policy,cv,alpha0,beta,main_factor,rework_factor,replications,"
      "mean_energy_per_batch,rework_ratio,mean_inspections_per_batch,"
      "ci95_lo,ci95_hi,ci99_lo,ci99_hi");
  for (const auto& s : summaries) {
    std::ostringstream os;
    os << s.point_id << ',' << s.policy << ',' << fmt(s.cv) << ','
       << fmt(s.alpha0) << ',' << fmt(s.beta) << ',' << fmt(s.main_factor)
       << ',' << fmt(s.rework_factor) << ',' << s.replications << ','
       << fmt(s.mean_energy_per_batch) << ',' << fmt(s.rework_ratio) << ','
       << fmt(s.mean_inspections_per_batch) << ',' << fmt(s.ci95.lo) << ','
       << fmt(s.ci95.hi) << ',' << fmt(s.ci99.lo) << ',' << fmt(s.ci99.hi);
    lines.push_back(os.str());
  }
  write_lines((fs::path(out_dir) / "kpi.csv").string(), lines);

  // Best configuration per (policy, cv), mirroring the benchmarking table.
  std::map<std::pair<std::string, double>, std::vector<sba::KpiSummary>>
      groups;
  for (const auto& s : summaries) groups[{s.policy, s.cv}].push_back(s);
  std::vector<std::string> best = provenance_comments(prov);
  best.push_back(
      "policy,cv,point_id,alpha0,beta,main_factor,rework_factor,"
      "mean_energy_per_batch,ci95_lo,ci95_hi,ci99_lo,ci99_hi");
  for (const auto& [key, group] : groups) {
    const auto& b = sba::best_summary(group);
    std::ostringstream os;
    os << key.first << ',' << fmt(key.second) << ',' << b.point_id << ','
       << fmt(b.alpha0) << ',' << fmt(b.beta) << ',' << fmt(b.main_factor)
       << ',' << fmt(b.rework_factor) << ',' << fmt(b.mean_energy_per_batch)
       << ',' << fmt(b.ci95.lo) << ',' << fmt(b.ci95.hi) << ','
       << fmt(b.ci99.lo) << ',' << fmt(b.ci99.hi);
    best.push_back(os.str());
  }
  write_lines((fs::path(out_dir) / "best.csv").string(), best);
  std::cout << "analyzed " << summaries.size() << " design points -> "
            << (fs::path(out_dir) / "kpi.csv").string() << "\n";
  return kExitOk;
}

int cmd_pareto(const std::string& results_path, const std::string& out_dir) {
  const auto rows = sba::read_store(results_path);
  const auto summaries = sba::aggregate_store(rows);
  const sba::CostRates rates;
  std::vector<sba::ParetoPoint> points;
  points.reserve(summaries.size());
  for (const auto& s : summaries) points.push_back(sba::to_costs(s, rates));
  const auto front = sba::pareto_front(points);
  std::map<std::string, std::string> prov{
      {"results_digest", sba::file_digest(results_path)}};
  std::vector<std::string> lines = provenance_comments(prov);
  lines.push_back("point_id,energy_cost,personnel_cost,on_front");
  for (const auto& p : points) {
    const bool on_front =
        std::any_of(front.begin(), front.end(), [&](const sba::ParetoPoint& q) {
          return q.point_id == p.point_id;
        });
    std::ostringstream os;
    os << p.point_id << ',' << fmt(p.energy_cost) << ','
       << fmt(p.personnel_cost) << ',' << (on_front ? 1 : 0);
    lines.push_back(os.str());
  }
  write_lines((fs::path(out_dir) / "pareto.csv").string(), lines);
  std::cout << "pareto front: " << front.size() << " of " << points.size()
            << " points\n";
  return kExitOk;
}

int cmd_calibrate(const std::string& table_path,
                  const std::string& scenario_path,
                  const std::string& out_dir) {
  const auto table = sba::load_inspection_table(table_path);
  std::map<std::string, std::string> prov{
      {"table_digest", sba::file_digest(table_path)}};
  std::vector<std::string> lines = provenance_comments(prov);
  lines.push_back(
      "program,estimated_curing_kwh,estimated_humidity_kwh,"
      "company_curing_kwh,company_humidity_kwh");
  for (const auto& row : table) {
    std::string est_c = "n/a";
    std::string est_h = "n/a";
    if (row.reworks > 0 && row.reworks < row.inspections) {
      est_c = fmt(sba::estimate_expected_min_energy(row));
      est_h = fmt(sba::estimate_expected_min_energy_humidity(row));
    }
    lines.push_back(row.program_id + "," + est_c + "," + est_h + "," +
                    fmt(row.company_expected_curing) + "," +
                    fmt(row.company_expected_humidity));
  }
  write_lines((fs::path(out_dir) / "calibration.csv").string(), lines);
  if (!scenario_path.empty()) {
    const auto scenario = sba::load_scenario(scenario_path);
    const auto shares = sba::demand_shares(scenario);
    const auto baseline = sba::weighted_baseline(table, shares);
    std::vector<std::string> share_lines = provenance_comments(prov);
    share_lines.push_back("program,demand_share");
    for (const auto& [id, s] : shares)
      share_lines.push_back(id + "," + fmt(s));
    share_lines.push_back("weighted_cv," + fmt(baseline.weighted_cv));
    share_lines.push_back("weighted_factor," + fmt(baseline.weighted_factor));
    write_lines((fs::path(out_dir) / "demand_shares.csv").string(),
                share_lines);
  }
  std::cout << "calibration report -> "
            << (fs::path(out_dir) / "calibration.csv").string() << "\n";
  return kExitOk;
}

int cmd_trace(const std::string& scenario_path, const std::string& program_id,
              const std::string& step_name, double beta, double alpha0,
              double alpha_floor, double cv, std::uint64_t seed,
              const std::string& out_dir) {
  const auto scenario = sba::load_scenario(scenario_path);
  const sba::StepKind step =
      step_name == "humidity" ? sba::StepKind::kHumidity
                              : sba::StepKind::kCuring;
  if (step_name != "curing" && step_name != "humidity") {
    throw std::invalid_argument("step must be curing or humidity");
  }
  const sba::PreparedProgram prepared(scenario.program(program_id),
                                      scenario.tau);
  sba::SbaConfig cfg;
  cfg.beta = beta;
  cfg.alpha0 = alpha0;
  cfg.alpha_floor = alpha_floor;
  cfg.tau = scenario.tau;
  cfg.expected_min_energy = prepared.expected_min_energy(step);
  cfg.cv_min_energy = cv;
  cfg.sigma_estimate = cv * cfg.expected_min_energy;
  cfg.validate();
  sba::RngStream root(seed, 0);
  sba::RngStream phi_rng = root.fork(0);
  sba::RngStream noise_rng = root.fork(1);
  const sba::LogNormalMeanCV phi_dist(cfg.expected_min_energy, cv);
  const double phi = phi_dist.sample(phi_rng);
  const auto run =
      sba::sba_run(cfg, prepared.cumulative(step), phi, noise_rng);
  std::map<std::string, std::string> prov{
      {"scenario_digest", sba::file_digest(scenario_path)},
      {"seed", std::to_string(seed)},
      {"program", program_id},
  };
  std::vector<std::string> lines = provenance_comments(prov);
  lines.push_back(
      "n,cum_energy,hidden_min_energy,sensor_reading,deviation,estimate,"
      "threshold,remaining_time,action");
  for (const auto& s : run.trace) {
    std::ostringstream os;
    os << s.n << ',' << fmt(s.cum_energy) << ',' << fmt(s.hidden_min_energy)
       << ',' << fmt(s.sensor_reading) << ',' << fmt(s.deviation) << ','
       << fmt(s.estimate) << ',' << fmt(s.threshold) << ','
       << fmt(s.remaining_time) << ','
       << (s.action == sba::Action::kTerminate ? "terminate" : "continue");
    lines.push_back(os.str());
  }
  write_lines((fs::path(out_dir) / "trace.csv").string(), lines);
  std::cout << "trace: Phi=" << phi << " kWh, stopped at iteration "
            << run.stopping_iteration << " ("
            << (run.stopping_iteration + 1) * cfg.tau << " min)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Discrete-event simulator and analysis toolkit for sensor-driven "
      "stopping of batch heat-treatment processes"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string grid_path;
  std::string results_path;
  std::string table_path;
  std::string out_dir = env_or("SBA_OUTPUT_DIR", "out");
  int parallelism = std::stoi(env_or("SBA_PARALLELISM", "0"));
  std::uint64_t seed = 1;
  std::string policy_name = "sba";
  double factor = 1.0;
  double beta = 0.95;
  double alpha0 = 0.2;
  double alpha_floor = 0.02;
  double trace_cv = 0.30;
  std::string program_id = "negative";
  std::string step_name = "curing";

  auto* validate = app.add_subcommand("validate", "Check scenario/grid files");
  validate->add_option("--scenario", scenario_path)->required();
  validate->add_option("--grid", grid_path);

  auto* simulate =
      app.add_subcommand("simulate", "Run one (scenario, policy, seed)");
  simulate->add_option("--scenario", scenario_path)->required();
  simulate->add_option("--policy", policy_name)
      ->check(CLI::IsMember({"sba", "opt", "baseline", "ideal"}));
  simulate->add_option("--factor", factor);
  simulate->add_option("--beta", beta);
  simulate->add_option("--alpha0", alpha0);
  simulate->add_option("--alpha-floor", alpha_floor);
  simulate->add_option("--seed", seed);
  simulate->add_option("--out", out_dir);

  auto* sweep = app.add_subcommand("sweep", "Run a full design-grid sweep");
  sweep->add_option("--scenario", scenario_path)->required();
  sweep->add_option("--grid", grid_path)->required();
  sweep->add_option("--out", out_dir);
  sweep->add_option("--parallelism", parallelism);

  auto* analyze =
      app.add_subcommand("analyze", "Aggregate a sweep results store");
  analyze->add_option("--results", results_path)->required();
  analyze->add_option("--out", out_dir);

  auto* pareto =
      app.add_subcommand("pareto", "Energy-vs-personnel cost front");
  pareto->add_option("--results", results_path)->required();
  pareto->add_option("--out", out_dir);

  auto* calibrate =
      app.add_subcommand("calibrate", "Back-calculate expected energies");
  calibrate->add_option("--table", table_path)->required();
  calibrate->add_option("--scenario", scenario_path);
  calibrate->add_option("--out", out_dir);

  auto* trace =
      app.add_subcommand("trace", "Per-iteration state trace for one batch");
  trace->add_option("--scenario", scenario_path)->required();
  trace->add_option("--program", program_id);
  trace->add_option("--step", step_name);
  trace->add_option("--beta", beta);
  trace->add_option("--alpha0", alpha0);
  trace->add_option("--alpha-floor", alpha_floor);
  trace->add_option("--cv", trace_cv);
  trace->add_option("--seed", seed);
  trace->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(scenario_path, grid_path);
    if (simulate->parsed()) {
      return cmd_simulate(scenario_path, out_dir,
                          make_policy(policy_name, factor, beta, alpha0,
                                      alpha_floor),
                          seed);
    }
    if (sweep->parsed())
      return cmd_sweep(scenario_path, grid_path, out_dir, parallelism);
    if (analyze->parsed()) return cmd_analyze(results_path, out_dir);
    if (pareto->parsed()) return cmd_pareto(results_path, out_dir);
    if (calibrate->parsed())
      return cmd_calibrate(table_path, scenario_path, out_dir);
    if (trace->parsed()) {
      return cmd_trace(scenario_path, program_id, step_name, beta, alpha0,
                       alpha_floor, trace_cv, seed, out_dir);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: kind=validation message=" << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    // Any failure while checking inputs is a validation failure; failures
    // during a run are runtime failures.
    if (validate->parsed()) {
      std::cerr << "error: kind=validation message=" << e.what() << "\n";
      return kExitValidation;
    }
    std::cerr << "error: kind=runtime message=" << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
