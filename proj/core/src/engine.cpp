#include "vecoffload/engine.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "stopwatch.hpp"
#include "vecoffload/error.hpp"
#include "vecoffload/regimes.hpp"

namespace vecoffload {
namespace {

constexpr std::array<SchedulerKind, 6> kAllKinds{
    SchedulerKind::Fcfs,      SchedulerKind::Sdf,      SchedulerKind::Cda,
    SchedulerKind::OffStaPso, SchedulerKind::OnStaPso, SchedulerKind::OnDynPso};

}  // namespace

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::Fcfs: return "fcfs";
    case SchedulerKind::Sdf: return "sdf";
    case SchedulerKind::Cda: return "cda";
    case SchedulerKind::OffStaPso: return "off_sta_pso";
    case SchedulerKind::OnStaPso: return "on_sta_pso";
    case SchedulerKind::OnDynPso: return "on_dyn_pso";
  }
  return "unknown";
}

SchedulerKind parse_scheduler_kind(std::string_view name) {
  for (SchedulerKind kind : kAllKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown scheduler '" + std::string(name) +
                    "' (expected fcfs, sdf, cda, off_sta_pso, on_sta_pso or on_dyn_pso)");
}

std::span<const SchedulerKind> all_scheduler_kinds() { return kAllKinds; }

bool is_pso(SchedulerKind kind) {
  return kind == SchedulerKind::OffStaPso || kind == SchedulerKind::OnStaPso ||
         kind == SchedulerKind::OnDynPso;
}

void validate(const EngineConfig& config) {
  if (config.exec_time.is_fixed() && !(config.exec_time.fixed_seconds >= 0.0)) {
    throw ConfigError("fixed execution time must be >= 0");
  }
  try {
    validate(config.weights);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

RunMetrics summarize(std::string scheduler, std::size_t num_tasks, const Timeline& timeline,
                     const ObjectiveWeights& weights, Seconds exec_time) {
  RunMetrics metrics;
  metrics.scheduler = std::move(scheduler);
  metrics.num_tasks = num_tasks;
  metrics.scheduler_exec_time = exec_time;

  std::vector<std::optional<TaskOutcome>> by_id(num_tasks);
  for (const TaskOutcome& outcome : timeline.outcomes()) {
    if (outcome.task_id < 0 || static_cast<std::size_t>(outcome.task_id) >= num_tasks) {
      throw InternalConsistencyError("outcome for unknown task " +
                                     std::to_string(outcome.task_id));
    }
    auto& slot = by_id[static_cast<std::size_t>(outcome.task_id)];
    if (slot) {
      throw InternalConsistencyError("task " + std::to_string(outcome.task_id) +
                                     " has more than one outcome");
    }
    slot = outcome;
  }
  metrics.per_task_outcomes.reserve(num_tasks);
  for (std::size_t id = 0; id < num_tasks; ++id) {
    if (!by_id[id]) {
      throw InternalConsistencyError("task " + std::to_string(id) + " was never resolved");
    }
    const TaskOutcome& outcome = *by_id[id];
    if (outcome.assigned()) {
      ++metrics.assigned_count;
      metrics.total_e2e += outcome.e2e_latency;
      metrics.total_waiting += outcome.waiting_time;
    } else {
      ++metrics.dropped_count;
    }
    metrics.per_task_outcomes.push_back(outcome);
  }
  if (num_tasks > 0) {
    metrics.drop_ratio = drop_ratio(metrics.per_task_outcomes);
    metrics.objective = objective_value(metrics.per_task_outcomes, weights);
  }
  if (metrics.assigned_count > 0) {
    const auto assigned = static_cast<double>(metrics.assigned_count);
    metrics.avg_e2e = metrics.total_e2e / assigned;
    metrics.avg_waiting = metrics.total_waiting / assigned;
  }
  metrics.servers.assign(timeline.servers().begin(), timeline.servers().end());
  return metrics;
}

DecisionWindow build_window(std::span<const Task> pending, Seconds t_e_av, Seconds span_start,
                            const LinkModel& link, int window_index) {
  if (t_e_av < span_start) {
    throw InvalidInput("build_window: window ends before it starts");
  }
  DecisionWindow window;
  window.window_index = window_index;
  window.span_start = span_start;
  window.span_end = t_e_av;
  for (const Task& task : pending) {
    if (task.arrival_time > t_e_av) continue;
    const Seconds waited = t_e_av - task.arrival_time;
    const Seconds communication = link.uplink_time(task.id) + link.solo_downlink_time(task);
    if (meets_window_deadline(waited, task.range_window, task.processing_time, communication)) {
      window.eligible.push_back(task);
    } else {
      window.excluded_infeasible.push_back(task.id);
    }
  }
  return window;
}

RunMetrics run_dynamic(const Scenario& scenario, Scheduler& scheduler,
                       const ExecTimeMode& exec_time, const ObjectiveWeights& weights) {
  validate(scenario);
  const auto link = scenario.link_model();
  Timeline timeline(scenario.num_servers, link);
  const std::span<const Task> tasks = scenario.tasks;

  // Bootstrap: the first arrivals go straight to the idle servers.
  const std::size_t bootstrap = std::min(tasks.size(), scenario.num_servers);
  Seconds span_start = 0.0;
  for (std::size_t i = 0; i < bootstrap; ++i) {
    const TaskOutcome& outcome = timeline.place_at(tasks[i], i, tasks[i].arrival_time);
    if (outcome.assigned()) span_start = std::max(span_start, outcome.start_processing_time);
  }
  std::vector<Task> pending(tasks.begin() + static_cast<std::ptrdiff_t>(bootstrap), tasks.end());

  std::vector<WindowRecord> log;
  Seconds exec_total = 0.0;
  // No decision can be issued before the previous one has finished, and an
  // idle engine waits for the next arrival.
  Seconds not_before = span_start;
  int window_index = 0;

  while (!pending.empty()) {
    const auto [server, t_e_av] = timeline.earliest();
    const Seconds instant = std::max(t_e_av, not_before);
    DecisionWindow window =
        build_window(pending, instant, std::min(span_start, instant), *link, window_index);
    if (const Seconds charge = exec_time.anticipated(); charge > 0.0) {
      // Candidates must still be feasible once the decision charge is added.
      std::erase_if(window.eligible, [&](const Task& t) {
        const Seconds communication = link->uplink_time(t.id) + link->solo_downlink_time(t);
        if (meets_window_deadline(instant + charge - t.arrival_time, t.range_window,
                                  t.processing_time, communication)) {
          return false;
        }
        window.excluded_infeasible.push_back(t.id);
        return true;
      });
    }

    for (TaskId id : window.excluded_infeasible) {
      auto it = std::find_if(pending.begin(), pending.end(),
                             [id](const Task& t) { return t.id == id; });
      timeline.drop(*it);
      pending.erase(it);
    }

    if (window.eligible.empty()) {
      if (!window.excluded_infeasible.empty()) {
        WindowRecord record;
        record.window_index = window_index++;
        record.span_start = window.span_start;
        record.span_end = window.span_end;
        record.excluded_infeasible = window.excluded_infeasible;
        log.push_back(std::move(record));
      }
      if (pending.empty()) break;
      not_before = std::max(not_before, pending.front().arrival_time);
      continue;
    }

    const DecisionContext context{window, timeline, server, instant, exec_time.anticipated()};
    detail::Stopwatch stopwatch;
    const std::optional<SchedulerDecision> decision = scheduler.decide(context);
    const Seconds charged = exec_time.charge(stopwatch.seconds());
    if (!decision) {
      throw InternalConsistencyError(std::string(scheduler.name()) +
                                     " made no decision on a non-empty window");
    }
    exec_total += charged;

    auto chosen = std::find_if(pending.begin(), pending.end(), [&](const Task& t) {
      return t.id == decision->chosen_task_id;
    });
    const bool in_window =
        std::any_of(window.eligible.begin(), window.eligible.end(),
                    [&](const Task& t) { return t.id == decision->chosen_task_id; });
    if (chosen == pending.end() || !in_window) {
      throw InternalConsistencyError(std::string(scheduler.name()) + " chose task " +
                                     std::to_string(decision->chosen_task_id) +
                                     " outside the decision window");
    }

    const Seconds start = instant + charged;
    const TaskOutcome& outcome = timeline.place_at(*chosen, server, start);
    pending.erase(chosen);
    not_before = start;
    if (outcome.assigned()) span_start = start;

    WindowRecord record;
    record.window_index = window_index++;
    record.span_start = window.span_start;
    record.span_end = window.span_end;
    for (const Task& t : window.eligible) record.eligible.push_back(t.id);
    record.excluded_infeasible = window.excluded_infeasible;
    record.decision = decision;
    record.exec_time = charged;
    record.start_time = start;
    record.chosen_dropped = !outcome.assigned();
    log.push_back(std::move(record));
  }

  RunMetrics metrics = summarize(std::string(scheduler.name()), tasks.size(), timeline, weights,
                                 exec_total);
  metrics.windows_log = std::move(log);
  return metrics;
}

RunMetrics run(const Scenario& scenario, const EngineConfig& engine,
               const std::optional<PsoParams>& pso_params) {
  validate(engine);
  if (is_pso(engine.scheduler_kind) != pso_params.has_value()) {
    throw ConfigError(pso_params ? "PSO parameters given for a non-PSO scheduler"
                                 : "PSO scheduler selected without PSO parameters");
  }
  switch (engine.scheduler_kind) {
    case SchedulerKind::Fcfs: {
      auto scheduler = make_fcfs_scheduler();
      return run_dynamic(scenario, *scheduler, engine.exec_time, engine.weights);
    }
    case SchedulerKind::Sdf: {
      auto scheduler = make_sdf_scheduler();
      return run_dynamic(scenario, *scheduler, engine.exec_time, engine.weights);
    }
    case SchedulerKind::Cda: {
      auto scheduler = make_cda_scheduler();
      return run_dynamic(scenario, *scheduler, engine.exec_time, engine.weights);
    }
    case SchedulerKind::OffStaPso:
      return run_off_sta_pso(scenario, *pso_params, engine.exec_time, engine.weights);
    case SchedulerKind::OnStaPso:
      return run_on_sta_pso(scenario, *pso_params, engine.exec_time, engine.weights);
    case SchedulerKind::OnDynPso:
      return run_on_dyn_pso(scenario, *pso_params, engine.exec_time, engine.weights);
  }
  throw ConfigError("unhandled scheduler kind");
}

}  // namespace vecoffload
