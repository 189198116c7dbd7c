#include "sba/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace fs = std::filesystem;

namespace sba {
namespace {

std::vector<double> levels(double lo, double hi, double step) {
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = lo + step * i;
    if (v > hi + 1e-9) break;
    out.push_back(std::round(v * 100.0) / 100.0);
  }
  return out;
}

}  // namespace

DesignGrid DesignGrid::benchmark_defaults() {
  DesignGrid g;
  g.cv_levels = {0.15, 0.30, 0.45};
  g.alpha0_levels = levels(0.05, 0.50, 0.05);
  g.main_factor_levels = levels(0.70, 1.25, 0.05);
  g.rework_factor_levels = levels(0.05, 0.60, 0.05);
  g.beta_levels = levels(0.40, 0.95, 0.05);
  g.replications = 20;
  return g;
}

void DesignGrid::validate() const {
  auto check = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) {
      throw std::invalid_argument(std::string("grid: ") + name + " is empty");
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] > v[i - 1])) {
        throw std::invalid_argument(std::string("grid: ") + name +
                                    " must be strictly increasing");
      }
    }
  };
  check(cv_levels, "cv_levels");
  check(alpha0_levels, "alpha0_levels");
  check(main_factor_levels, "main_factor_levels");
  check(rework_factor_levels, "rework_factor_levels");
  check(beta_levels, "beta_levels");
  if (replications < 1) {
    throw std::invalid_argument("grid: replications must be >= 1");
  }
  if (alpha_floor < 0.0) {
    throw std::invalid_argument("grid: alpha_floor must be >= 0");
  }
}

DesignGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open grid file: " + path);
  }
  nlohmann::json j;
  in >> j;
  DesignGrid g = DesignGrid::benchmark_defaults();
  auto get = [&j](const char* key, std::vector<double>& out) {
    if (j.contains(key)) out = j.at(key).get<std::vector<double>>();
  };
  get("cv_levels", g.cv_levels);
  get("alpha0_levels", g.alpha0_levels);
  get("main_factor_levels", g.main_factor_levels);
  get("rework_factor_levels", g.rework_factor_levels);
  get("beta_levels", g.beta_levels);
  g.replications = j.value("replications", g.replications);
  g.alpha_floor = j.value("alpha_floor", g.alpha_floor);
  g.include_baseline = j.value("include_baseline", false);
  g.include_ideal = j.value("include_ideal", false);
  g.common_random_numbers = j.value("common_random_numbers", false);
  if (j.contains("horizon_years")) g.horizon_years = j.at("horizon_years").get<int>();
  if (j.contains("warmup_years")) g.warmup_years = j.at("warmup_years").get<int>();
  g.validate();
  return g;
}

std::vector<DesignPoint> enumerate_grid(const DesignGrid& grid) {
  grid.validate();
  std::vector<DesignPoint> points;
  long id = 0;
  for (double cv : grid.cv_levels) {
    for (double factor : grid.main_factor_levels) {
      for (double rework : grid.rework_factor_levels) {
        points.push_back({id++, PolicySpec::opt(factor), cv, rework});
      }
    }
  }
  for (double cv : grid.cv_levels) {
    for (double alpha0 : grid.alpha0_levels) {
      for (double beta : grid.beta_levels) {
        for (double rework : grid.rework_factor_levels) {
          points.push_back(
              {id++, PolicySpec::sba(beta, alpha0, grid.alpha_floor), cv, rework});
        }
      }
    }
  }
  if (grid.include_baseline) {
    for (double cv : grid.cv_levels) {
      for (double rework : grid.rework_factor_levels) {
        points.push_back({id++, PolicySpec::baseline(), cv, rework});
      }
    }
  }
  if (grid.include_ideal) {
    for (double cv : grid.cv_levels) {
      // rework factor is irrelevant for Ideal (no rework by construction);
      // pinned to the first level for a stable id binding
      points.push_back(
          {id++, PolicySpec::ideal(), cv, grid.rework_factor_levels.front()});
    }
  }
  return points;
}

RunRow summarize_run(const DesignPoint& point, int replication,
                     std::span<const BatchRecord> records) {
  RunRow row;
  row.point_id = point.point_id;
  row.replication = replication;
  row.policy = to_string(point.policy.kind);
  row.cv = point.cv;
  row.rework_factor = point.rework_factor;
  if (point.policy.kind == PolicyKind::kSba) {
    row.alpha0 = point.policy.alpha0;
    row.beta = point.policy.beta;
  } else if (point.policy.kind != PolicyKind::kIdeal) {
    row.main_factor = point.policy.effective_factor();
  }
  double energy = 0.0;
  long reworked = 0;
  long inspections = 0;
  long count = 0;
  for (const auto& r : records) {
    if (r.in_warmup) continue;
    ++count;
    energy += r.total_reported_energy;
    inspections += r.inspection_count;
    if (r.curing.rework_cycles > 0 || r.humidity.rework_cycles > 0) ++reworked;
  }
  row.batch_count = count;
  if (count > 0) {
    row.mean_energy_per_batch = energy / static_cast<double>(count);
    row.rework_ratio = static_cast<double>(reworked) / static_cast<double>(count);
    row.mean_inspections_per_batch =
        static_cast<double>(inspections) / static_cast<double>(count);
  }
  return row;
}

ScenarioConfig apply_point(const ScenarioConfig& base, const DesignGrid& grid,
                           const DesignPoint& point) {
  ScenarioConfig cfg = base;
  cfg.cv_min_energy = point.cv;
  for (auto& p : cfg.programs) p.rework_factor = point.rework_factor;
  if (grid.horizon_years) cfg.horizon_years = *grid.horizon_years;
  if (grid.warmup_years) cfg.warmup_years = *grid.warmup_years;
  return cfg;
}

RngStream run_stream(const DesignGrid& grid, const DesignPoint& point,
                     int replication) {
  const std::uint64_t design =
      grid.common_random_numbers ? 0 : static_cast<std::uint64_t>(point.point_id);
  return seed_for(design, static_cast<std::uint64_t>(replication));
}

const char* kRunRowHeader =
    "point_id,replication,policy,cv,alpha0,beta,main_factor,rework_factor,"
    "batch_count,mean_energy_per_batch,rework_ratio,mean_inspections_per_batch";

std::string format_row(const RunRow& r) {
  std::ostringstream out;
  out.precision(17);
  out << r.point_id << ',' << r.replication << ',' << r.policy << ',' << r.cv
      << ',' << r.alpha0 << ',' << r.beta << ',' << r.main_factor << ','
      << r.rework_factor << ',' << r.batch_count << ','
      << r.mean_energy_per_batch << ',' << r.rework_ratio << ','
      << r.mean_inspections_per_batch;
  return out.str();
}

RunRow parse_row(const std::string& line) {
  std::istringstream in(line);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (fields.size() != 12) {
    throw std::runtime_error("results store: malformed row: " + line);
  }
  RunRow r;
  r.point_id = std::stol(fields[0]);
  r.replication = std::stoi(fields[1]);
  r.policy = fields[2];
  r.cv = std::stod(fields[3]);
  r.alpha0 = std::stod(fields[4]);
  r.beta = std::stod(fields[5]);
  r.main_factor = std::stod(fields[6]);
  r.rework_factor = std::stod(fields[7]);
  r.batch_count = std::stol(fields[8]);
  r.mean_energy_per_batch = std::stod(fields[9]);
  r.rework_ratio = std::stod(fields[10]);
  r.mean_inspections_per_batch = std::stod(fields[11]);
  return r;
}

void write_store(const std::string& path, const std::vector<RunRow>& rows,
                 const std::vector<std::string>& provenance_comments) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    for (const auto& c : provenance_comments) out << "# " << c << '\n';
    out << kRunRowHeader << '\n';
    for (const auto& r : rows) out << format_row(r) << '\n';
  }
  fs::rename(tmp, path);
}

std::vector<RunRow> read_store(const std::string& results_csv) {
  std::ifstream in(results_csv);
  if (!in) throw std::runtime_error("cannot open results store: " + results_csv);
  std::vector<RunRow> rows;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != kRunRowHeader) {
        throw std::runtime_error("results store: unexpected header: " + line);
      }
      saw_header = true;
      continue;
    }
    rows.push_back(parse_row(line));
  }
  return rows;
}

SweepOutcome run_sweep(const DesignGrid& grid, const ScenarioConfig& scenario,
                       const SweepOptions& options) {
  grid.validate();
  scenario.validate();
  const std::vector<DesignPoint> points = enumerate_grid(grid);

  const fs::path out_dir(options.output_dir);
  const fs::path runs_dir = out_dir / "runs";
  fs::create_directories(runs_dir);

  struct Task {
    const DesignPoint* point;
    int replication;
    fs::path row_file;
  };
  std::vector<Task> tasks;
  SweepOutcome outcome;
  for (const auto& point : points) {
    for (int rep = 0; rep < grid.replications; ++rep) {
      char name[64];
      std::snprintf(name, sizeof(name), "p%06ld_r%03d.row", point.point_id, rep);
      fs::path row_file = runs_dir / name;
      if (fs::exists(row_file)) {
        ++outcome.skipped;
        continue;
      }
      tasks.push_back({&point, rep, std::move(row_file)});
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<long> executed{0};
  std::atomic<long> failed{0};
  std::mutex log_mutex;
  std::vector<std::string> failures;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      try {
        const ScenarioConfig cfg = apply_point(scenario, grid, *task.point);
        const RngStream root = run_stream(grid, *task.point, task.replication);
        const std::vector<BatchRecord> records =
            simulate(cfg, task.point->policy, root);
        const RunRow row = summarize_run(*task.point, task.replication, records);
        const fs::path tmp = task.row_file.string() + ".tmp";
        {
          std::ofstream out(tmp);
          if (!out) throw std::runtime_error("cannot write " + tmp.string());
          out << format_row(row) << '\n';
        }
        fs::rename(tmp, task.row_file);
        ++executed;
      } catch (const std::exception& e) {
        ++failed;
        std::lock_guard<std::mutex> lock(log_mutex);
        failures.push_back(task.row_file.filename().string() + ": " + e.what());
      }
    }
  };

  const int n_threads =
      options.parallelism > 0
          ? options.parallelism
          : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  outcome.executed = executed.load();
  outcome.failed = failed.load();

  if (!failures.empty()) {
    std::ofstream out(out_dir / "failed.txt");
    for (const auto& f : failures) out << f << '\n';
  }

  // Merge: deterministic (point, replication) order regardless of worker
  // count or completion order.
  std::vector<RunRow> rows;
  for (const auto& point : points) {
    for (int rep = 0; rep < grid.replications; ++rep) {
      char name[64];
      std::snprintf(name, sizeof(name), "p%06ld_r%03d.row", point.point_id, rep);
      const fs::path row_file = runs_dir / name;
      if (!fs::exists(row_file)) continue;
      std::ifstream in(row_file);
      std::string line;
      if (std::getline(in, line)) rows.push_back(parse_row(line));
    }
  }
  write_store((out_dir / "results.csv").string(), rows,
              {"scenario_digest=" + options.scenario_digest,
               "grid_digest=" + options.grid_digest});

  nlohmann::json manifest;
  manifest["points"] = points.size();
  manifest["replications"] = grid.replications;
  manifest["rows"] = rows.size();
  manifest["scenario_digest"] = options.scenario_digest;
  manifest["grid_digest"] = options.grid_digest;
  manifest["common_random_numbers"] = grid.common_random_numbers;
  {
    const fs::path tmp = out_dir / "manifest.json.tmp";
    std::ofstream out(tmp);
    out << manifest.dump(2) << '\n';
    out.close();
    fs::rename(tmp, out_dir / "manifest.json");
  }
  return outcome;
}

}  // namespace sba
