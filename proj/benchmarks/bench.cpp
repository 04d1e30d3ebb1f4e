#include <random>

#include <benchmark/benchmark.h>

#include "vecoffload/engine.hpp"
#include "vecoffload/pso.hpp"
#include "vecoffload/schedulers.hpp"
#include "vecoffload/workload.hpp"

namespace vo = vecoffload;

namespace {

vo::Scenario scenario(int vehicles) {
  vo::WorkloadConfig config;
  config.num_vehicles = vehicles;
  config.arrival_rate = vo::default_arrival_rate(vehicles);
  config.seed = 1;
  return vo::generate_scenario(config);
}

void BM_GenerateScenario(benchmark::State& state) {
  vo::WorkloadConfig config;
  config.num_vehicles = static_cast<int>(state.range(0));
  config.arrival_rate = vo::default_arrival_rate(config.num_vehicles);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vo::generate_scenario(config));
  }
}
BENCHMARK(BM_GenerateScenario)->Arg(50)->Arg(200)->Arg(1000);

void BM_ScheduleCda(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  vo::DecisionWindow window;
  for (int i = 0; i < state.range(0); ++i) {
    vo::Task t;
    t.id = i;
    t.arrival_time = u(gen);
    t.processing_time = 0.5 + u(gen) / 5.0;
    t.deadline = t.arrival_time + t.processing_time + u(gen);
    window.eligible.push_back(t);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(vo::schedule_cda(window, 10.0));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ScheduleCda)->RangeMultiplier(2)->Range(2, 64)->Complexity();

void BM_PsoRun(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)));
  const vo::SequenceSlice slice{s.tasks, vo::Timeline(s.num_servers, s.link_model()), 0.0, 0.0, true, {}};
  vo::PsoParams params;
  params.max_iterations = 20;
  for (auto _ : state) {
    benchmark::DoNotOptimize(vo::pso_run(slice, params, vo::FitnessMode::Offline));
  }
}
BENCHMARK(BM_PsoRun)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_RunDynamic(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)));
  const auto kind = static_cast<vo::SchedulerKind>(state.range(1));
  state.SetLabel(std::string(vo::to_string(kind)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(vo::run(s, {vo::ExecTimeMode::fixed(0.0), kind, {}}));
  }
}
BENCHMARK(BM_RunDynamic)
    ->ArgsProduct({{50, 100, 200},
                   {static_cast<long>(vo::SchedulerKind::Fcfs), static_cast<long>(vo::SchedulerKind::Sdf),
                    static_cast<long>(vo::SchedulerKind::Cda)}})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
