#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vecoffload/model.hpp"
#include "vecoffload/pso.hpp"
#include "vecoffload/schedulers.hpp"
#include "vecoffload/timeline.hpp"
#include "vecoffload/workload.hpp"

namespace vecoffload {

enum class SchedulerKind { Fcfs, Sdf, Cda, OffStaPso, OnStaPso, OnDynPso };

std::string_view to_string(SchedulerKind kind);
// Throws ConfigError for an unknown name.
SchedulerKind parse_scheduler_kind(std::string_view name);
std::span<const SchedulerKind> all_scheduler_kinds();
bool is_pso(SchedulerKind kind);

// How a decision's own execution time is charged to the chosen task's start.
struct ExecTimeMode {
  enum class Kind { Measured, Fixed };
  Kind kind = Kind::Measured;
  Seconds fixed_seconds = 0.0;

  static ExecTimeMode measured() { return {}; }
  static ExecTimeMode fixed(Seconds seconds) { return {Kind::Fixed, seconds}; }
  bool is_fixed() const { return kind == Kind::Fixed; }
  // The charge for a decision that took `wall_clock` seconds.
  Seconds charge(Seconds wall_clock) const { return is_fixed() ? fixed_seconds : wall_clock; }
  // What a lookahead policy should assume before it has run.
  Seconds anticipated() const { return is_fixed() ? fixed_seconds : 0.0; }

  friend bool operator==(const ExecTimeMode&, const ExecTimeMode&) = default;
};

struct EngineConfig {
  ExecTimeMode exec_time;
  SchedulerKind scheduler_kind = SchedulerKind::Cda;
  ObjectiveWeights weights;
};

void validate(const EngineConfig& config);

struct WindowRecord {
  int window_index = 0;
  Seconds span_start = 0.0;
  Seconds span_end = 0.0;
  std::vector<TaskId> eligible;
  std::vector<TaskId> excluded_infeasible;
  std::optional<SchedulerDecision> decision;
  Seconds exec_time = 0.0;  // charged to the chosen task
  Seconds start_time = 0.0;
  bool chosen_dropped = false;  // the charge pushed the choice past its deadline
};

struct RunMetrics {
  std::string scheduler;
  std::size_t num_tasks = 0;
  std::size_t assigned_count = 0;
  std::size_t dropped_count = 0;
  double drop_ratio = 0.0;
  Seconds total_e2e = 0.0;
  Seconds avg_e2e = 0.0;  // over assigned tasks
  Seconds total_waiting = 0.0;
  Seconds avg_waiting = 0.0;
  double objective = 0.0;
  // Measured mode: wall clock inside scheduling decisions. Fixed mode: the
  // total configured charge, so reruns serialize identically.
  Seconds scheduler_exec_time = 0.0;
  std::vector<TaskOutcome> per_task_outcomes;  // indexed by task id
  std::vector<WindowRecord> windows_log;
  std::vector<MecState> servers;
  std::optional<ConvergenceTrace> convergence;
};

// Aggregates a finished timeline. Throws InternalConsistencyError unless every
// task of the scenario has exactly one outcome.
RunMetrics summarize(std::string scheduler, std::size_t num_tasks, const Timeline& timeline,
                     const ObjectiveWeights& weights, Seconds exec_time);

// Splits the arrived part of `pending` into deadline-feasible candidates and
// tasks that can no longer make it if started at t_e_av. Tasks arriving after
// t_e_av are left out of both lists.
DecisionWindow build_window(std::span<const Task> pending, Seconds t_e_av, Seconds span_start,
                            const LinkModel& link, int window_index = 0);

// Dynamic executor: bootstrap the first tasks onto idle servers at their
// arrivals, then repeatedly open a window at the earliest availability and let
// `scheduler` pick one task for that server.
RunMetrics run_dynamic(const Scenario& scenario, Scheduler& scheduler,
                       const ExecTimeMode& exec_time, const ObjectiveWeights& weights);

// Dispatches on engine.scheduler_kind. pso_params must be present exactly when
// a PSO regime is selected.
RunMetrics run(const Scenario& scenario, const EngineConfig& engine,
               const std::optional<PsoParams>& pso_params = std::nullopt);

}  // namespace vecoffload
