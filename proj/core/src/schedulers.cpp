#include "vecoffload/schedulers.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "vecoffload/error.hpp"

namespace vecoffload {
namespace {

// Picks the eligible task minimizing (key, arrival, id) and records each key
// as that candidate's audit cost.
template <typename KeyFn>
std::optional<SchedulerDecision> pick_min(const DecisionWindow& window, ServerIndex target,
                                          KeyFn key) {
  if (window.eligible.empty()) return std::nullopt;
  SchedulerDecision decision;
  decision.target_server = target;
  const Task* best = nullptr;
  double best_key = 0.0;
  for (const Task& task : window.eligible) {
    const double k = key(task);
    decision.per_candidate_costs[task.id] = k;
    if (best == nullptr || std::tie(k, task.arrival_time, task.id) <
                               std::tie(best_key, best->arrival_time, best->id)) {
      best = &task;
      best_key = k;
    }
  }
  decision.chosen_task_id = best->id;
  decision.decision_cost = best_key;
  return decision;
}

class FcfsScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "fcfs"; }
  std::optional<SchedulerDecision> decide(const DecisionContext& context) override {
    return schedule_fcfs(context.window, context.target_server);
  }
};

class SdfScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "sdf"; }
  std::optional<SchedulerDecision> decide(const DecisionContext& context) override {
    return schedule_sdf(context.window, context.target_server);
  }
};

class CdaScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "cda"; }
  std::optional<SchedulerDecision> decide(const DecisionContext& context) override {
    return schedule_cda(context.window, context.t_e_av, context.target_server);
  }
};

}  // namespace

std::optional<SchedulerDecision> schedule_fcfs(const DecisionWindow& window,
                                               ServerIndex target_server) {
  return pick_min(window, target_server, [](const Task& t) { return t.arrival_time; });
}

std::optional<SchedulerDecision> schedule_sdf(const DecisionWindow& window,
                                              ServerIndex target_server) {
  return pick_min(window, target_server, [](const Task& t) { return t.deadline; });
}

int drop_condition(Seconds selected_processing, Seconds affected_waiting,
                   Seconds affected_max_waiting) {
  if (affected_max_waiting < 0.0) return 1;
  return selected_processing + affected_waiting <= affected_max_waiting ? 0 : 1;
}

double cda_cost(const Task& selected, const DecisionWindow& window, Seconds t_e_av) {
  const bool member = std::any_of(window.eligible.begin(), window.eligible.end(),
                                  [&](const Task& t) { return t.id == selected.id; });
  if (!member) {
    throw InvalidInput("cda_cost: task " + std::to_string(selected.id) +
                       " is not in the decision window");
  }
  double cost = 0.0;
  for (const Task& affected : window.eligible) {
    if (affected.id == selected.id) continue;
    const Seconds waited = std::max(0.0, t_e_av - affected.arrival_time);
    const Seconds max_wait = max_waiting_time(affected);
    if (max_wait <= 0.0 || drop_condition(selected.processing_time, waited, max_wait) == 1) {
      cost += 1.0;
    } else {
      cost += (selected.processing_time + waited) / max_wait;
    }
  }
  return cost;
}

std::optional<SchedulerDecision> schedule_cda(const DecisionWindow& window, Seconds t_e_av,
                                              ServerIndex target_server) {
  return pick_min(window, target_server,
                  [&](const Task& t) { return cda_cost(t, window, t_e_av); });
}

std::unique_ptr<Scheduler> make_fcfs_scheduler() { return std::make_unique<FcfsScheduler>(); }
std::unique_ptr<Scheduler> make_sdf_scheduler() { return std::make_unique<SdfScheduler>(); }
std::unique_ptr<Scheduler> make_cda_scheduler() { return std::make_unique<CdaScheduler>(); }

}  // namespace vecoffload
