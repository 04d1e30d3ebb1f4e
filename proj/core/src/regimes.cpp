#include "vecoffload/regimes.hpp"

#include <algorithm>

#include "stopwatch.hpp"
#include "vecoffload/error.hpp"
#include "vecoffload/rng.hpp"

namespace vecoffload {
namespace {

// First tasks straight onto the idle servers, server i taking task i.
Timeline bootstrap(const Scenario& scenario, std::shared_ptr<const LinkModel> link,
                   Seconds not_before) {
  Timeline timeline(scenario.num_servers, std::move(link));
  const std::size_t count = std::min(scenario.tasks.size(), scenario.num_servers);
  for (std::size_t i = 0; i < count; ++i) {
    const Task& task = scenario.tasks[i];
    timeline.place_at(task, i, std::max(task.arrival_time, not_before));
  }
  return timeline;
}

std::vector<Task> remainder(const Scenario& scenario) {
  const std::size_t skip = std::min(scenario.tasks.size(), scenario.num_servers);
  return {scenario.tasks.begin() + static_cast<std::ptrdiff_t>(skip), scenario.tasks.end()};
}

class DynPsoScheduler final : public Scheduler {
 public:
  DynPsoScheduler(const PsoParams& params, const ObjectiveWeights& weights)
      : params_(params), weights_(weights) {
    validate(params_);
  }

  std::string_view name() const override { return "on_dyn_pso"; }

  std::optional<SchedulerDecision> decide(const DecisionContext& context) override {
    const DecisionWindow& window = context.window;
    if (window.eligible.empty()) return std::nullopt;

    SequenceSlice slice{window.eligible, context.timeline.forked(context.t_e_av), context.t_e_av,
                        context.anticipated_exec_time, false, weights_};
    PsoParams params = params_;
    params.seed = mix_seed(params_.seed, static_cast<std::uint64_t>(window.window_index));
    const PsoResult result = pso_run(slice, params, FitnessMode::Online);

    SchedulerDecision decision;
    decision.chosen_task_id = result.best_order.front().id;
    decision.target_server = context.target_server;
    decision.decision_cost = result.best_fitness;
    return decision;
  }

 private:
  PsoParams params_;
  ObjectiveWeights weights_;
};

}  // namespace

RunMetrics run_off_sta_pso(const Scenario& scenario, const PsoParams& params,
                           const ExecTimeMode& exec_time, const ObjectiveWeights& weights) {
  validate(scenario);
  validate(params);
  const auto link = scenario.link_model();
  SequenceSlice slice{remainder(scenario), bootstrap(scenario, link, 0.0), 0.0, 0.0, true,
                      weights};
  if (slice.tasks.empty()) {
    return summarize("off_sta_pso", scenario.tasks.size(), slice.base, weights, 0.0);
  }

  detail::Stopwatch stopwatch;
  PsoResult result = pso_run(slice, params, FitnessMode::Offline);
  const Seconds spent = exec_time.charge(stopwatch.seconds());

  // Offline: the search happened before anything arrived, so it costs nothing.
  const Timeline timeline = replay_order(result.best_order, slice, FitnessMode::Offline);
  RunMetrics metrics = summarize("off_sta_pso", scenario.tasks.size(), timeline, weights, spent);
  metrics.convergence = std::move(result.trace);
  return metrics;
}

RunMetrics run_on_sta_pso(const Scenario& scenario, const PsoParams& params,
                          const ExecTimeMode& exec_time, const ObjectiveWeights& weights) {
  validate(scenario);
  validate(params);
  const auto link = scenario.link_model();
  if (scenario.tasks.empty()) {
    return summarize("on_sta_pso", 0, Timeline(scenario.num_servers, link), weights, 0.0);
  }
  const Seconds release = scenario.tasks.back().arrival_time;
  const Seconds guess = exec_time.anticipated();

  SequenceSlice slice{remainder(scenario), bootstrap(scenario, link, release + guess), release,
                      guess, true, weights};
  if (slice.tasks.empty()) {
    const Seconds spent = exec_time.charge(0.0);
    const Timeline timeline = bootstrap(scenario, link, release + spent);
    return summarize("on_sta_pso", scenario.tasks.size(), timeline, weights, spent);
  }

  detail::Stopwatch stopwatch;
  PsoResult result = pso_run(slice, params, FitnessMode::Online);
  const Seconds spent = exec_time.charge(stopwatch.seconds());

  // Nothing starts before the optimizer has answered.
  slice.base = bootstrap(scenario, link, release + spent);
  slice.exec_time = spent;
  const Timeline timeline = replay_order(result.best_order, slice, FitnessMode::Online);
  RunMetrics metrics = summarize("on_sta_pso", scenario.tasks.size(), timeline, weights, spent);
  metrics.convergence = std::move(result.trace);
  return metrics;
}

RunMetrics run_on_dyn_pso(const Scenario& scenario, const PsoParams& params,
                          const ExecTimeMode& exec_time, const ObjectiveWeights& weights) {
  DynPsoScheduler scheduler(params, weights);
  return run_dynamic(scenario, scheduler, exec_time, weights);
}

std::unique_ptr<Scheduler> make_dyn_pso_scheduler(const PsoParams& params,
                                                  const ObjectiveWeights& weights) {
  return std::make_unique<DynPsoScheduler>(params, weights);
}

}  // namespace vecoffload
