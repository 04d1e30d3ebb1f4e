#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vecoffload/engine.hpp"
#include "vecoffload/error.hpp"
#include "vecoffload/regimes.hpp"

namespace vo = vecoffload;

namespace {

const auto kFixedZero = vo::ExecTimeMode::fixed(0.0);

vo::RunMetrics run_kind(const vo::Scenario& s, vo::SchedulerKind kind,
                        vo::ExecTimeMode mode = kFixedZero) {
  const vo::EngineConfig engine{mode, kind, {}};
  return vo::run(s, engine, vo::is_pso(kind) ? std::optional<vo::PsoParams>(vo::PsoParams{})
                                             : std::nullopt);
}

std::vector<int> ids(const std::vector<vo::Task>& tasks) {
  std::vector<int> out;
  for (const auto& t : tasks) out.push_back(t.id);
  return out;
}

// Wraps the window PSO and checks each decision against exhaustive enumeration
// of the window's orders.
class CheckedDynPso : public vo::Scheduler {
 public:
  explicit CheckedDynPso(vo::PsoParams params) : inner_(vo::make_dyn_pso_scheduler(params, {})) {}
  std::string_view name() const override { return "checked"; }

  std::optional<vo::SchedulerDecision> decide(const vo::DecisionContext& ctx) override {
    auto decision = inner_->decide(ctx);
    const auto& eligible = ctx.window.eligible;
    if (!decision || eligible.size() > 6) return decision;
    const vo::SequenceSlice slice{eligible, ctx.timeline.forked(ctx.t_e_av), ctx.t_e_av,
                                  ctx.anticipated_exec_time, false, {}};
    std::vector<vo::Task> order = eligible;
    std::sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.id < b.id; });
    double best = 1e300;
    double best_with_choice = 1e300;
    do {
      const double f = vo::fitness(order, slice, vo::FitnessMode::Online);
      best = std::min(best, f);
      if (order.front().id == decision->chosen_task_id) best_with_choice = std::min(best_with_choice, f);
    } while (std::next_permutation(order.begin(), order.end(),
                                   [](auto& a, auto& b) { return a.id < b.id; }));
    ++checked;
    if (best_with_choice > best + 1e-12) ++mismatches;
    return decision;
  }

  int checked = 0;
  int mismatches = 0;

 private:
  std::unique_ptr<vo::Scheduler> inner_;
};

}  // namespace

TEST(Run, TwoTasksAreBootstrapOnly) {
  const auto s = oracle::random_scenario(3, 2);
  for (const auto kind : vo::all_scheduler_kinds()) {
    const auto m = run_kind(s, kind);
    EXPECT_TRUE(m.windows_log.empty()) << vo::to_string(kind);
    // on-sta holds everything until the last arrival
    if (kind == vo::SchedulerKind::OnStaPso) continue;
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& o = m.per_task_outcomes[i];
      if (!o.assigned()) continue;  // a tight random deadline can still drop it
      EXPECT_EQ(*o.assigned_mec, i);
      EXPECT_DOUBLE_EQ(o.start_processing_time, s.tasks[i].arrival_time);
      EXPECT_DOUBLE_EQ(o.waiting_time, 0.0);
    }
  }
}

TEST(Run, InfeasibleThirdTaskIsDroppedByEveryScheduler) {
  auto s = oracle::random_scenario(4, 3);
  for (auto& t : s.tasks) {
    t.range_window = 40.0;
    t.deadline = t.offload_ready_time + 40.0;
  }
  s.tasks[2].range_window = s.tasks[2].processing_time * 0.5;
  s.tasks[2].deadline = s.tasks[2].offload_ready_time + s.tasks[2].range_window;
  for (const auto kind : vo::all_scheduler_kinds()) {
    const auto m = run_kind(s, kind);
    EXPECT_EQ(m.dropped_count, 1u) << vo::to_string(kind);
    EXPECT_TRUE(m.per_task_outcomes[2].dropped);
  }
}

TEST(Run, CdaBetweenOptimumAndFcfs) {
  std::mt19937_64 gen(808);
  int within = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = oracle::random_scenario(gen(), 4 + trial % 4);
    const double optimum = oracle::brute_force_optimum(s, 0.4);
    const auto cda = run_kind(s, vo::SchedulerKind::Cda);
    const auto fcfs = run_kind(s, vo::SchedulerKind::Fcfs);
    ASSERT_GE(cda.objective, optimum - 1e-9) << "trial " << trial;
    if (cda.objective <= fcfs.objective + 1e-12) ++within;
  }
  EXPECT_GE(within, 45);
}

TEST(Run, EveryRunPassesTheBookkeepingChecks) {
  std::mt19937_64 gen(909);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = oracle::random_scenario(gen(), 12, 6.0);
    for (const auto kind : vo::all_scheduler_kinds()) {
      for (const auto mode : {kFixedZero, vo::ExecTimeMode::fixed(0.05), vo::ExecTimeMode::measured()}) {
        const auto m = run_kind(s, kind, mode);
        const auto bad = oracle::check_run(s, m);
        ASSERT_TRUE(bad.empty()) << vo::to_string(kind) << ": " << bad.front();
      }
    }
  }
}

TEST(Run, FixedChargeIsDeterministic) {
  const auto s = oracle::random_scenario(12, 14);
  for (const auto kind : vo::all_scheduler_kinds()) {
    const auto a = run_kind(s, kind, vo::ExecTimeMode::fixed(0.01));
    const auto b = run_kind(s, kind, vo::ExecTimeMode::fixed(0.01));
    EXPECT_EQ(a.per_task_outcomes, b.per_task_outcomes) << vo::to_string(kind);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.scheduler_exec_time, b.scheduler_exec_time);
  }
}

TEST(Run, FixedChargeDelaysEveryWindowedStart) {
  const auto s = oracle::random_scenario(13, 10);
  const auto m = run_kind(s, vo::SchedulerKind::Cda, vo::ExecTimeMode::fixed(0.05));
  for (const auto& w : m.windows_log) {
    if (!w.decision) continue;
    EXPECT_DOUBLE_EQ(w.exec_time, 0.05);
    EXPECT_GE(w.start_time, w.span_end + 0.05 - 1e-12);
  }
  EXPECT_NEAR(m.scheduler_exec_time, 0.05 * static_cast<double>(std::count_if(
                                                m.windows_log.begin(), m.windows_log.end(),
                                                [](auto& w) { return w.decision.has_value(); })),
              1e-12);
}

TEST(Run, PsoParamsMustMatchTheRegime) {
  const auto s = oracle::random_scenario(5, 4);
  EXPECT_THROW(vo::run(s, {kFixedZero, vo::SchedulerKind::Cda, {}}, vo::PsoParams{}), vo::ConfigError);
  EXPECT_THROW(vo::run(s, {kFixedZero, vo::SchedulerKind::OnDynPso, {}}), vo::ConfigError);
  EXPECT_THROW(vo::run(s, {vo::ExecTimeMode::fixed(-1.0), vo::SchedulerKind::Cda, {}}), vo::ConfigError);
  vo::ObjectiveWeights bad;
  bad.lambda = 1.5;
  EXPECT_THROW(vo::run(s, {kFixedZero, vo::SchedulerKind::Cda, bad}), vo::ConfigError);
}

TEST(SchedulerKind, NamesRoundTrip) {
  for (const auto kind : vo::all_scheduler_kinds()) {
    EXPECT_EQ(vo::parse_scheduler_kind(vo::to_string(kind)), kind);
  }
  EXPECT_EQ(vo::all_scheduler_kinds().size(), 6u);
  EXPECT_THROW(vo::parse_scheduler_kind("edf"), vo::ConfigError);
}

TEST(BuildWindow, NothingArrived) {
  const auto s = oracle::random_scenario(6, 4);
  const auto w = vo::build_window(s.tasks, s.tasks.front().arrival_time - 1.0,
                                  s.tasks.front().arrival_time - 2.0, *s.link_model());
  EXPECT_TRUE(w.eligible.empty());
  EXPECT_TRUE(w.excluded_infeasible.empty());
}

TEST(BuildWindow, OneFeasibleOneNot) {
  auto s = oracle::random_scenario(7, 2);
  for (auto& t : s.tasks) {
    t.range_window = 50.0;
    t.deadline = t.offload_ready_time + 50.0;
  }
  s.tasks[1].range_window = s.tasks[1].processing_time * 0.5;
  const double instant = s.tasks[1].arrival_time;
  const auto w = vo::build_window(s.tasks, instant, 0.0, *s.link_model());
  ASSERT_EQ(w.eligible.size(), 1u);
  EXPECT_EQ(w.eligible[0].id, 0);
  EXPECT_EQ(w.excluded_infeasible, std::vector<vo::TaskId>{1});
  EXPECT_THROW(vo::build_window(s.tasks, 1.0, 2.0, *s.link_model()), vo::InvalidInput);
}

TEST(BuildWindow, MatchesAnIndependentFilter) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = oracle::random_scenario(gen(), 15, 5.0);
    const auto up = oracle::uplinks(s.tasks, s.channel, s.concurrency_epsilon);
    std::uniform_real_distribution<double> at(0.0, 12.0);
    const double instant = at(gen);
    const auto w = vo::build_window(s.tasks, instant, 0.0, *s.link_model());
    const auto expected = oracle::split_window(s.tasks, instant, up, s.channel);
    ASSERT_EQ(ids(w.eligible), expected.eligible);
    ASSERT_EQ(w.excluded_infeasible, expected.excluded);
  }
}

TEST(RunDynamic, WindowPsoPicksTheEnumeratedBest) {
  std::mt19937_64 gen(123);
  int checked = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const auto s = oracle::random_scenario(gen(), 10, 3.0);
    vo::PsoParams params;
    params.seed = gen();
    CheckedDynPso scheduler(params);
    const auto m = vo::run_dynamic(s, scheduler, kFixedZero, {});
    EXPECT_EQ(scheduler.mismatches, 0) << "trial " << trial;
    EXPECT_TRUE(oracle::check_run(s, m).empty());
    checked += scheduler.checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(RunDynamic, WindowsAdvanceMonotonically) {
  const auto s = oracle::random_scenario(31, 40, 10.0);
  const auto m = run_kind(s, vo::SchedulerKind::Sdf, vo::ExecTimeMode::fixed(0.02));
  for (std::size_t i = 1; i < m.windows_log.size(); ++i) {
    EXPECT_GE(m.windows_log[i].span_end, m.windows_log[i - 1].span_end);
    EXPECT_EQ(m.windows_log[i].window_index, m.windows_log[i - 1].window_index + 1);
  }
}

TEST(Summarize, MissingOutcomeIsAnInternalError) {
  const auto s = oracle::random_scenario(8, 3);
  vo::Timeline timeline(2, s.link_model());
  timeline.place_at(s.tasks[0], 0, s.tasks[0].arrival_time);
  EXPECT_THROW(vo::summarize("x", 3, timeline, {}, 0.0), vo::InternalConsistencyError);
  timeline.place_at(s.tasks[0], 1, s.tasks[0].arrival_time);
  EXPECT_THROW(vo::summarize("x", 1, timeline, {}, 0.0), vo::InternalConsistencyError);
}
