#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "vecoffload/model.hpp"
#include "vecoffload/timeline.hpp"

namespace vecoffload {

// Arrived, unassigned tasks that can still meet their deadline if started at
// span_end (the earliest server availability).
struct DecisionWindow {
  int window_index = 0;
  Seconds span_start = 0.0;  // start of the most recently assigned task
  Seconds span_end = 0.0;    // earliest availability: the decision instant
  std::vector<Task> eligible;
  std::vector<TaskId> excluded_infeasible;  // arrived but cannot make it; dropped
};

struct SchedulerDecision {
  TaskId chosen_task_id = 0;
  ServerIndex target_server = 0;
  double decision_cost = 0.0;
  std::map<TaskId, double> per_candidate_costs;
};

// Earliest arrival wins; ties go to the lowest id. Empty window -> nullopt.
std::optional<SchedulerDecision> schedule_fcfs(const DecisionWindow& window,
                                               ServerIndex target_server = 0);

// Earliest absolute deadline wins; ties by arrival, then id.
std::optional<SchedulerDecision> schedule_sdf(const DecisionWindow& window,
                                              ServerIndex target_server = 0);

// 1 if running the selected task first pushes the affected task past its
// maximum waiting time, else 0. The boundary survives.
int drop_condition(Seconds selected_processing, Seconds affected_waiting,
                   Seconds affected_max_waiting);

// Cost of running `selected` next: over every other eligible task, add 1 if it
// would be dropped, otherwise the fraction of its maximum waiting time consumed
// by (selected processing + its wait so far at t_e_av).
double cda_cost(const Task& selected, const DecisionWindow& window, Seconds t_e_av);

// Evaluates cda_cost for each eligible task and picks the cheapest; ties by
// arrival, then id. Empty window -> nullopt.
std::optional<SchedulerDecision> schedule_cda(const DecisionWindow& window, Seconds t_e_av,
                                              ServerIndex target_server = 0);

// Everything a pluggable policy may look at when a server frees up.
struct DecisionContext {
  const DecisionWindow& window;
  const Timeline& timeline;
  ServerIndex target_server = 0;
  Seconds t_e_av = 0.0;
  // Best guess of this decision's own execution time; lookahead policies use
  // it to shift their internal simulation.
  Seconds anticipated_exec_time = 0.0;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string_view name() const = 0;
  virtual std::optional<SchedulerDecision> decide(const DecisionContext& context) = 0;
};

std::unique_ptr<Scheduler> make_fcfs_scheduler();
std::unique_ptr<Scheduler> make_sdf_scheduler();
std::unique_ptr<Scheduler> make_cda_scheduler();

}  // namespace vecoffload
