#pragma once

// Experiment matrix: schedulers x vehicle counts x seeds.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vecoffload/engine.hpp"
#include "vecoffload/io.hpp"
#include "vecoffload/pso.hpp"
#include "vecoffload/workload.hpp"

namespace vecoffload {

std::vector<std::uint64_t> default_seeds();

struct ExperimentPlan {
  std::vector<int> vehicle_counts{50, 100, 200};
  std::vector<SchedulerKind> schedulers{all_scheduler_kinds().begin(),
                                        all_scheduler_kinds().end()};
  std::vector<std::uint64_t> seeds = default_seeds();
  WorkloadConfig workload;
  // Unset: default_arrival_rate(vehicle count).
  std::optional<double> arrival_rate;
  PsoParams pso;
  EngineConfig engine;  // scheduler_kind is ignored
  std::filesystem::path output_dir = "results";
  int jobs = 1;
};

// Throws ConfigError; creates output_dir to confirm it is writable.
void validate(const ExperimentPlan& plan);

// Applies a JSON config document on top of `base`. Throws ParseError.
ExperimentPlan plan_from_json(std::string_view text, ExperimentPlan base = {});

// Workload for one matrix cell.
WorkloadConfig workload_for(const ExperimentPlan& plan, int vehicles, std::uint64_t seed);

// One run of the engine with the plan's settings.
RunMetrics run_cell(const Scenario& scenario, SchedulerKind kind, const ExperimentPlan& plan);

struct AggregateRow {
  std::string scheduler;
  int vehicles = 0;
  std::size_t runs = 0;
  // dropped_count, drop_ratio, total_e2e, avg_e2e, total_waiting, avg_waiting,
  // exec_time_s, objective
  std::vector<double> mean;
  std::vector<double> ci95;  // Student-t half-width; 0 with fewer than 2 runs
};

std::vector<std::string_view> aggregate_metric_names();
std::vector<AggregateRow> aggregate(std::span<const SummaryRow> rows);
std::string aggregate_to_csv(std::span<const AggregateRow> rows);

struct RunFailure {
  std::string scheduler;
  int vehicles = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct ExperimentReport {
  std::vector<SummaryRow> rows;  // sorted by scheduler, vehicles, seed
  std::vector<AggregateRow> aggregates;
  std::vector<RunFailure> failures;
};

// Runs every cell and writes into plan.output_dir:
//   summary.csv, aggregate.csv, failures.csv,
//   scenarios/n<N>_s<seed>.json,
//   runs/<scheduler>_n<N>_s<seed>.json (+ .outcomes.jsonl, .windows.jsonl),
//   convergence/<scheduler>_n<N>_s<seed>.csv for the static PSO regimes.
ExperimentReport run_experiment(const ExperimentPlan& plan);

// Deterministic re-run of a saved scenario with a configured decision time.
RunMetrics replay(const std::filesystem::path& scenario_file, SchedulerKind kind,
                  Seconds fixed_exec_time, const PsoParams& pso = {},
                  const ObjectiveWeights& weights = {});

}  // namespace vecoffload
