#include "vecoffload/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "vecoffload/error.hpp"

namespace vecoffload {
namespace {

using json = nlohmann::json;

std::string cell_name(int vehicles, std::uint64_t seed) {
  return "n" + std::to_string(vehicles) + "_s" + std::to_string(seed);
}

std::string run_name(SchedulerKind kind, int vehicles, std::uint64_t seed) {
  return std::string(to_string(kind)) + "_" + cell_name(vehicles, seed);
}

[[noreturn]] void bad_field(const std::string& field, std::string_view message) {
  throw ParseError(field + ": " + std::string(message));
}

template <typename Parse>
auto nested(const json& doc, const std::string& key, Parse parse) {
  try {
    return parse(doc.at(key).dump());
  } catch (const ParseError& e) {
    throw ParseError(key + ": " + e.what());
  }
}

double t_quantile_975(std::size_t degrees) {
  boost::math::students_t dist(static_cast<double>(degrees));
  return boost::math::quantile(dist, 0.975);
}

std::array<double, 8> metric_values(const SummaryRow& r) {
  return {static_cast<double>(r.dropped_count), r.drop_ratio, r.total_e2e, r.avg_e2e,
          r.total_waiting, r.avg_waiting, r.exec_time_s, r.objective};
}

}  // namespace

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds(10);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{1});
  return seeds;
}

void validate(const ExperimentPlan& plan) {
  if (plan.vehicle_counts.empty()) throw ConfigError("vehicle_counts must not be empty");
  if (plan.schedulers.empty()) throw ConfigError("schedulers must not be empty");
  if (plan.seeds.empty()) throw ConfigError("seeds must not be empty");
  for (int count : plan.vehicle_counts) {
    if (count < 1) throw ConfigError("vehicle counts must be >= 1");
  }
  if (plan.arrival_rate && !(*plan.arrival_rate > 0.0)) {
    throw ConfigError("arrival_rate must be > 0");
  }
  if (plan.jobs < 1) throw ConfigError("jobs must be >= 1");
  validate(plan.pso);
  validate(plan.engine);
  validate(workload_for(plan, plan.vehicle_counts.front(), plan.seeds.front()));
  std::error_code ec;
  std::filesystem::create_directories(plan.output_dir, ec);
  if (ec || !std::filesystem::is_directory(plan.output_dir)) {
    throw ConfigError("output directory '" + plan.output_dir.string() + "' is not writable");
  }
}

ExperimentPlan plan_from_json(std::string_view text, ExperimentPlan plan) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) bad_field("<root>", "expected an object");
  static const std::set<std::string> known{"vehicle_counts", "schedulers", "seeds", "workload",
                                           "arrival_rate",   "pso",        "exec_time", "lambda",
                                           "output_dir",     "jobs"};
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) bad_field(item.key(), "unknown field");
  }

  if (doc.contains("vehicle_counts")) {
    const json& counts = doc["vehicle_counts"];
    if (!counts.is_array()) bad_field("vehicle_counts", "expected an array");
    plan.vehicle_counts.clear();
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (!counts[i].is_number_integer()) {
        bad_field("vehicle_counts[" + std::to_string(i) + "]", "expected an integer");
      }
      plan.vehicle_counts.push_back(counts[i].get<int>());
    }
  }
  if (doc.contains("schedulers")) {
    const json& names = doc["schedulers"];
    if (!names.is_array()) bad_field("schedulers", "expected an array");
    plan.schedulers.clear();
    for (std::size_t i = 0; i < names.size(); ++i) {
      const std::string field = "schedulers[" + std::to_string(i) + "]";
      if (!names[i].is_string()) bad_field(field, "expected a string");
      try {
        plan.schedulers.push_back(parse_scheduler_kind(names[i].get<std::string>()));
      } catch (const ConfigError& e) {
        bad_field(field, e.what());
      }
    }
  }
  if (doc.contains("seeds")) {
    const json& seeds = doc["seeds"];
    if (!seeds.is_array()) bad_field("seeds", "expected an array");
    plan.seeds.clear();
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (!seeds[i].is_number_unsigned()) {
        bad_field("seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
      }
      plan.seeds.push_back(seeds[i].get<std::uint64_t>());
    }
  }
  if (doc.contains("workload")) plan.workload = nested(doc, "workload", workload_from_json);
  if (doc.contains("arrival_rate")) {
    if (!doc["arrival_rate"].is_number()) bad_field("arrival_rate", "expected a number");
    plan.arrival_rate = doc["arrival_rate"].get<double>();
  }
  if (doc.contains("pso")) plan.pso = nested(doc, "pso", pso_params_from_json);
  if (doc.contains("exec_time")) {
    const json& mode = doc["exec_time"];
    if (!mode.is_object() || !mode.contains("mode") || !mode["mode"].is_string()) {
      bad_field("exec_time.mode", "expected \"measured\" or \"fixed\"");
    }
    const std::string kind = mode["mode"].get<std::string>();
    if (kind == "measured") {
      plan.engine.exec_time = ExecTimeMode::measured();
    } else if (kind == "fixed") {
      if (!mode.contains("fixed_seconds") || !mode["fixed_seconds"].is_number()) {
        bad_field("exec_time.fixed_seconds", "expected a number");
      }
      plan.engine.exec_time = ExecTimeMode::fixed(mode["fixed_seconds"].get<double>());
    } else {
      bad_field("exec_time.mode", "expected \"measured\" or \"fixed\"");
    }
  }
  if (doc.contains("lambda")) {
    if (!doc["lambda"].is_number()) bad_field("lambda", "expected a number");
    plan.engine.weights.lambda = doc["lambda"].get<double>();
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) bad_field("output_dir", "expected a string");
    plan.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("jobs")) {
    if (!doc["jobs"].is_number_integer()) bad_field("jobs", "expected an integer");
    plan.jobs = doc["jobs"].get<int>();
  }
  return plan;
}

WorkloadConfig workload_for(const ExperimentPlan& plan, int vehicles, std::uint64_t seed) {
  WorkloadConfig config = plan.workload;
  config.num_vehicles = vehicles;
  config.seed = seed;
  config.arrival_rate = plan.arrival_rate.value_or(default_arrival_rate(vehicles));
  return config;
}

RunMetrics run_cell(const Scenario& scenario, SchedulerKind kind, const ExperimentPlan& plan) {
  EngineConfig engine = plan.engine;
  engine.scheduler_kind = kind;
  std::optional<PsoParams> pso;
  if (is_pso(kind)) pso = plan.pso;
  return run(scenario, engine, pso);
}

std::vector<std::string_view> aggregate_metric_names() {
  return {"dropped_count", "drop_ratio",  "total_e2e",   "avg_e2e",
          "total_waiting", "avg_waiting", "exec_time_s", "objective"};
}

std::vector<AggregateRow> aggregate(std::span<const SummaryRow> rows) {
  std::map<std::pair<std::string, int>, std::vector<std::array<double, 8>>> groups;
  for (const SummaryRow& row : rows) {
    groups[{row.scheduler, row.vehicles}].push_back(metric_values(row));
  }
  std::vector<AggregateRow> out;
  for (const auto& [key, samples] : groups) {
    AggregateRow agg;
    agg.scheduler = key.first;
    agg.vehicles = key.second;
    agg.runs = samples.size();
    const auto n = static_cast<double>(samples.size());
    const double t = samples.size() > 1 ? t_quantile_975(samples.size() - 1) : 0.0;
    for (std::size_t m = 0; m < 8; ++m) {
      double sum = 0.0;
      for (const auto& s : samples) sum += s[m];
      const double mean = sum / n;
      double squares = 0.0;
      for (const auto& s : samples) squares += (s[m] - mean) * (s[m] - mean);
      agg.mean.push_back(mean);
      agg.ci95.push_back(samples.size() > 1 ? t * std::sqrt(squares / (n - 1.0)) / std::sqrt(n)
                                            : 0.0);
    }
    out.push_back(std::move(agg));
  }
  return out;
}

std::string aggregate_to_csv(std::span<const AggregateRow> rows) {
  std::string out = "scheduler,vehicles,runs";
  for (std::string_view name : aggregate_metric_names()) {
    out += "," + std::string(name) + "_mean," + std::string(name) + "_ci95";
  }
  out += "\n";
  for (const AggregateRow& row : rows) {
    out += csv_escape(row.scheduler) + "," + std::to_string(row.vehicles) + "," +
           std::to_string(row.runs);
    for (std::size_t m = 0; m < row.mean.size(); ++m) {
      out += "," + format_double(row.mean[m]) + "," + format_double(row.ci95[m]);
    }
    out += "\n";
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentPlan& plan) {
  validate(plan);
  const std::filesystem::path& dir = plan.output_dir;

  struct Cell {
    SchedulerKind kind;
    int vehicles;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (SchedulerKind kind : plan.schedulers) {
    for (int vehicles : plan.vehicle_counts) {
      for (std::uint64_t seed : plan.seeds) cells.push_back({kind, vehicles, seed});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return std::make_tuple(to_string(a.kind), a.vehicles, a.seed) <
           std::make_tuple(to_string(b.kind), b.vehicles, b.seed);
  });

  // Scenarios are shared by every scheduler of a cell.
  std::map<std::pair<int, std::uint64_t>, Scenario> scenarios;
  std::map<std::pair<int, std::uint64_t>, std::string> scenario_errors;
  for (int vehicles : plan.vehicle_counts) {
    for (std::uint64_t seed : plan.seeds) {
      try {
        Scenario scenario = generate_scenario(workload_for(plan, vehicles, seed));
        save_scenario(dir / "scenarios" / (cell_name(vehicles, seed) + ".json"), scenario);
        scenarios.emplace(std::make_pair(vehicles, seed), std::move(scenario));
      } catch (const std::exception& e) {
        scenario_errors[{vehicles, seed}] = e.what();
      }
    }
  }

  std::vector<std::optional<SummaryRow>> rows(cells.size());
  std::vector<std::optional<RunFailure>> failures(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      const auto key = std::make_pair(cell.vehicles, cell.seed);
      const std::string scheduler(to_string(cell.kind));
      if (auto err = scenario_errors.find(key); err != scenario_errors.end()) {
        failures[i] = RunFailure{scheduler, cell.vehicles, cell.seed, err->second};
        continue;
      }
      try {
        const RunMetrics metrics = run_cell(scenarios.at(key), cell.kind, plan);
        const std::string name = run_name(cell.kind, cell.vehicles, cell.seed);
        write_file(dir / "runs" / (name + ".json"), metrics_to_json(metrics));
        write_file(dir / "runs" / (name + ".outcomes.jsonl"), outcomes_to_jsonl(metrics));
        write_file(dir / "runs" / (name + ".windows.jsonl"), windows_to_jsonl(metrics));
        if (metrics.convergence) {
          write_file(dir / "convergence" / (name + ".csv"),
                     convergence_to_csv(*metrics.convergence));
        }
        rows[i] = summary_row(metrics, cell.vehicles, cell.seed);
      } catch (const std::exception& e) {
        failures[i] = RunFailure{scheduler, cell.vehicles, cell.seed, e.what()};
      }
    }
  };
  const int threads = std::min<int>(plan.jobs, static_cast<int>(cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ExperimentReport report;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (rows[i]) report.rows.push_back(std::move(*rows[i]));
    if (failures[i]) report.failures.push_back(std::move(*failures[i]));
  }
  report.aggregates = aggregate(report.rows);

  std::string summary = std::string(kSummaryHeader) + "\n";
  for (const SummaryRow& row : report.rows) summary += to_csv_line(row) + "\n";
  write_file(dir / "summary.csv", summary);
  write_file(dir / "aggregate.csv", aggregate_to_csv(report.aggregates));
  std::string failed = "scheduler,vehicles,seed,error\n";
  for (const RunFailure& f : report.failures) {
    failed += csv_escape(f.scheduler) + "," + std::to_string(f.vehicles) + "," +
              std::to_string(f.seed) + "," + csv_escape(f.message) + "\n";
  }
  write_file(dir / "failures.csv", failed);
  return report;
}

RunMetrics replay(const std::filesystem::path& scenario_file, SchedulerKind kind,
                  Seconds fixed_exec_time, const PsoParams& pso, const ObjectiveWeights& weights) {
  const Scenario scenario = load_scenario(scenario_file);
  EngineConfig engine{ExecTimeMode::fixed(fixed_exec_time), kind, weights};
  std::optional<PsoParams> params;
  if (is_pso(kind)) params = pso;
  return run(scenario, engine, params);
}

}  // namespace vecoffload
