#pragma once

// The three PSO scheduling regimes.
//
//   off-sta: every task known up front, the optimizer's run time is free.
//   on-sta:  one optimization over the whole set once the last task has
//            arrived; nothing starts until it finishes.
//   on-dyn:  one optimization per decision window; each run's time delays the
//            task it picks.

#include <memory>

#include "vecoffload/engine.hpp"
#include "vecoffload/pso.hpp"

namespace vecoffload {

RunMetrics run_off_sta_pso(const Scenario& scenario, const PsoParams& params,
                           const ExecTimeMode& exec_time, const ObjectiveWeights& weights);

RunMetrics run_on_sta_pso(const Scenario& scenario, const PsoParams& params,
                          const ExecTimeMode& exec_time, const ObjectiveWeights& weights);

RunMetrics run_on_dyn_pso(const Scenario& scenario, const PsoParams& params,
                          const ExecTimeMode& exec_time, const ObjectiveWeights& weights);

// Window policy behind run_on_dyn_pso: optimizes the order of the window's
// tasks and returns its head. Each window gets its own derived seed.
std::unique_ptr<Scheduler> make_dyn_pso_scheduler(const PsoParams& params,
                                                  const ObjectiveWeights& weights);

}  // namespace vecoffload
