// vecoffload: run experiment matrices, replay saved scenarios, generate workloads.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vecoffload/error.hpp"
#include "vecoffload/experiment.hpp"
#include "vecoffload/io.hpp"

namespace {

using namespace vecoffload;

constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;

struct Overrides {
  std::string config;
  std::vector<int> vehicles;
  std::vector<std::string> schedulers;
  std::vector<std::uint64_t> seeds;
  std::string exec_time_mode;
  std::optional<double> fixed_exec_time;
  std::string out;
  std::optional<int> jobs;
};

ExperimentPlan build_plan(const Overrides& o) {
  ExperimentPlan plan;
  if (const char* env = std::getenv("VECOFFLOAD_OUT_DIR"); env && *env) plan.output_dir = env;
  if (!o.config.empty()) plan = plan_from_json(read_file(o.config), plan);
  if (!o.vehicles.empty()) plan.vehicle_counts = o.vehicles;
  if (!o.schedulers.empty()) {
    plan.schedulers.clear();
    for (const std::string& name : o.schedulers) plan.schedulers.push_back(parse_scheduler_kind(name));
  }
  if (!o.seeds.empty()) plan.seeds = o.seeds;
  if (o.exec_time_mode == "measured") {
    plan.engine.exec_time = ExecTimeMode::measured();
  } else if (o.exec_time_mode == "fixed") {
    plan.engine.exec_time = ExecTimeMode::fixed(o.fixed_exec_time.value_or(0.0));
  } else if (o.fixed_exec_time) {
    plan.engine.exec_time = ExecTimeMode::fixed(*o.fixed_exec_time);
  }
  if (!o.out.empty()) plan.output_dir = o.out;
  if (o.jobs) plan.jobs = *o.jobs;
  return plan;
}

void add_common(CLI::App& cmd, Overrides& o) {
  cmd.add_option("-c,--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd.add_option("--exec-time-mode", o.exec_time_mode, "decision-time accounting")
      ->check(CLI::IsMember({"measured", "fixed"}));
  cmd.add_option("--fixed-exec-time", o.fixed_exec_time, "seconds charged per decision")
      ->check(CLI::NonNegativeNumber);
}

int do_run(const Overrides& o) {
  const ExperimentPlan plan = build_plan(o);
  const ExperimentReport report = run_experiment(plan);
  std::cout << kSummaryHeader << "\n";
  for (const SummaryRow& row : report.rows) std::cout << to_csv_line(row) << "\n";
  for (const RunFailure& f : report.failures) {
    std::cerr << "failed: " << f.scheduler << " vehicles=" << f.vehicles << " seed=" << f.seed
              << ": " << f.message << "\n";
  }
  std::cerr << report.rows.size() << " runs written to " << plan.output_dir.string() << "\n";
  return report.failures.empty() ? EXIT_SUCCESS : kExitRunFailure;
}

int do_replay(const Overrides& o, const std::string& scenario_file) {
  ExperimentPlan plan;
  if (!o.config.empty()) plan = plan_from_json(read_file(o.config), plan);
  if (o.schedulers.size() != 1) throw ConfigError("replay needs exactly one --scheduler");
  const SchedulerKind kind = parse_scheduler_kind(o.schedulers.front());
  if (o.exec_time_mode == "measured") throw ConfigError("replay always uses a fixed execution time");
  const RunMetrics metrics = replay(scenario_file, kind, o.fixed_exec_time.value_or(0.0),
                                    plan.pso, plan.engine.weights);
  const std::string json = metrics_to_json(metrics);
  if (o.out.empty()) {
    std::cout << json;
  } else {
    write_file(o.out, json);
  }
  return EXIT_SUCCESS;
}

int do_generate(const Overrides& o) {
  ExperimentPlan plan = build_plan(o);
  if (plan.vehicle_counts.size() != 1 || plan.seeds.size() != 1) {
    throw ConfigError("generate needs exactly one vehicle count and one seed");
  }
  const Scenario scenario =
      generate_scenario(workload_for(plan, plan.vehicle_counts.front(), plan.seeds.front()));
  const std::string json = scenario_to_json(scenario);
  if (o.out.empty()) {
    std::cout << json;
  } else {
    write_file(o.out, json);
  }
  return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular edge offloading simulator"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run_cmd = app.add_subcommand("run", "run an experiment matrix");
  add_common(*run_cmd, run_opts);
  run_cmd->add_option("-n,--vehicles", run_opts.vehicles, "vehicle counts")->check(CLI::PositiveNumber);
  run_cmd->add_option("-s,--scheduler", run_opts.schedulers,
                      "fcfs, sdf, cda, off_sta_pso, on_sta_pso, on_dyn_pso");
  run_cmd->add_option("--seed", run_opts.seeds, "workload seeds");
  run_cmd->add_option("-o,--out", run_opts.out, "output directory (default $VECOFFLOAD_OUT_DIR or ./results)");
  run_cmd->add_option("-j,--jobs", run_opts.jobs, "parallel runs")->check(CLI::PositiveNumber);

  Overrides replay_opts;
  std::string scenario_file;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a saved scenario deterministically");
  add_common(*replay_cmd, replay_opts);
  replay_cmd->add_option("scenario", scenario_file, "scenario JSON")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("-s,--scheduler", replay_opts.schedulers, "scheduler name")->required();
  replay_cmd->add_option("-o,--out", replay_opts.out, "metrics JSON file (default stdout)");

  Overrides gen_opts;
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic scenario");
  add_common(*gen_cmd, gen_opts);
  gen_cmd->add_option("-n,--vehicles", gen_opts.vehicles, "vehicle count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_opts.seeds, "workload seed");
  gen_cmd->add_option("-o,--out", gen_opts.out, "scenario JSON file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(run_opts);
    if (replay_cmd->parsed()) return do_replay(replay_opts, scenario_file);
    if (gen_opts.vehicles.empty()) gen_opts.vehicles = {100};
    if (gen_opts.seeds.empty()) gen_opts.seeds = {1};
    return do_generate(gen_opts);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
}
