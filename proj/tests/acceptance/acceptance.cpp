// Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero
// if any selected criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "vecoffload/engine.hpp"
#include "vecoffload/experiment.hpp"
#include "vecoffload/io.hpp"
#include "vecoffload/regimes.hpp"
#include "vecoffload/schedulers.hpp"

namespace vo = vecoffload;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream out;
  out.precision(4);
  (out << ... << args);
  return out.str();
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

vo::RunMetrics run_kind(const vo::Scenario& s, vo::SchedulerKind kind, vo::ExecTimeMode mode,
                        const vo::PsoParams& pso = {}) {
  return vo::run(s, {mode, kind, {}},
                 vo::is_pso(kind) ? std::optional<vo::PsoParams>(pso) : std::nullopt);
}

vo::Scenario workload_scenario(int vehicles, std::uint64_t seed) {
  const vo::ExperimentPlan plan;
  return vo::generate_scenario(vo::workload_for(plan, vehicles, seed));
}

// 1. formula suite
Verdict formula_suite() {
  Clock clock;
  const int code = run_command(std::string(VECOFFLOAD_MODEL_TEST_PATH) + " --gtest_brief=1 >/dev/null 2>&1");
  const double t = clock.seconds();
  return {code == 0 && t < 5.0, cat("model tests exit ", code, " in ", t, " s (limit 5 s)")};
}

// 2. Off-Sta-PSO against exhaustive enumeration
Verdict brute_force_optimality() {
  Clock clock;
  std::mt19937_64 gen(2024);
  int hits = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto s = oracle::random_scenario(gen(), 4 + i % 4);
    const double optimum = oracle::brute_force_optimum(s, 0.4);
    const auto m = vo::run_off_sta_pso(s, {}, vo::ExecTimeMode::fixed(0.0), {});
    const double gap = (m.objective - optimum) / optimum;
    worst = std::max(worst, gap);
    if (gap <= 0.05 + 1e-12) ++hits;
  }
  const double t = clock.seconds();
  return {hits >= 45 && t < 120.0,
          cat(hits, "/50 within 5% of the optimum (worst gap ", worst * 100.0, "%) in ", t, " s")};
}

// 3. regime ordering at 100 vehicles
Verdict regime_ordering() {
  using K = vo::SchedulerKind;
  const std::array kinds{K::OffStaPso, K::Cda, K::OnDynPso, K::Fcfs, K::Sdf, K::OnStaPso};
  std::array<double, 6> drops{};
  std::array<double, 6> e2e{};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = workload_scenario(100, seed);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const auto m = run_kind(s, kinds[k], vo::ExecTimeMode::measured());
      drops[k] += static_cast<double>(m.dropped_count) / 10.0;
      e2e[k] += m.avg_e2e / 10.0;
    }
  }
  const double greedy_worst = std::max(drops[3], drops[4]);
  const bool drop_order = drops[0] <= drops[1] && drops[1] <= drops[2] && drops[2] <= greedy_worst &&
                          greedy_worst <= drops[5];
  const bool e2e_order = e2e[0] <= e2e[1] && e2e[5] == *std::max_element(e2e.begin(), e2e.end());
  std::string detail = "mean drops";
  for (std::size_t k = 0; k < kinds.size(); ++k) detail += cat(" ", vo::to_string(kinds[k]), "=", drops[k]);
  detail += "; mean avg_e2e";
  for (std::size_t k = 0; k < kinds.size(); ++k) detail += cat(" ", vo::to_string(kinds[k]), "=", e2e[k]);
  if (!drop_order) detail += "; drop ordering violated";
  if (!e2e_order) detail += "; latency ordering violated";
  return {drop_order && e2e_order, detail};
}

// 4. decision time of CDA versus window PSO
Verdict execution_time_gap() {
  const auto measured = vo::ExecTimeMode::measured();
  std::array<double, 3> cda{};
  const std::array counts{50, 100, 200};
  const std::uint64_t seeds = 3;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
      cda[c] += run_kind(workload_scenario(counts[c], seed), vo::SchedulerKind::Cda, measured)
                    .scheduler_exec_time / static_cast<double>(seeds);
    }
  }
  const auto pso = run_kind(workload_scenario(200, 1), vo::SchedulerKind::OnDynPso, measured);
  const auto cda200 = run_kind(workload_scenario(200, 1), vo::SchedulerKind::Cda, measured);
  const double ratio = pso.scheduler_exec_time / std::max(cda200.scheduler_exec_time, 1e-12);
  const double exponent = std::log(cda[2] / cda[0]) / std::log(4.0);
  const bool pass = cda200.scheduler_exec_time < 1.0 && ratio >= 100.0 && exponent < 2.0;
  return {pass, cat("cda at 200: ", cda200.scheduler_exec_time, " s, on_dyn_pso: ", pso.scheduler_exec_time,
                    " s, ratio ", ratio, "; cda mean 50/100/200: ", cda[0], "/", cda[1], "/", cda[2],
                    " s, growth exponent ", exponent)};
}

// 5. bookkeeping over the default matrix
Verdict bookkeeping() {
  Clock clock;
  const vo::ExperimentPlan plan;
  std::size_t runs = 0;
  std::size_t violations = 0;
  std::string first;
  for (int n : plan.vehicle_counts) {
    for (std::uint64_t seed : plan.seeds) {
      const auto s = vo::generate_scenario(vo::workload_for(plan, n, seed));
      for (const auto kind : plan.schedulers) {
        const auto m = vo::run_cell(s, kind, plan);
        const auto bad = oracle::check_run(s, m);
        ++runs;
        violations += bad.size();
        if (!bad.empty() && first.empty()) first = cat(m.scheduler, " n=", n, " seed=", seed, ": ", bad.front());
      }
    }
  }
  return {violations == 0 && runs == 180,
          cat(runs, " runs, ", violations, " violations in ", clock.seconds(), " s",
              first.empty() ? "" : "; first: " + first)};
}

vo::Task window_task(int id, double arrival, double deadline, double p) {
  vo::Task t;
  t.id = id;
  t.size_bits = 2160e3;
  t.result_size_bits = 2160e3;
  t.arrival_time = arrival;
  t.offload_ready_time = arrival;
  t.deadline = deadline;
  t.range_window = deadline - arrival;
  t.processing_time = p;
  return t;
}

// 6. CDA argmin against the reference scorer
Verdict cda_argmin() {
  Clock clock;
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_real_distribution<double> arrival(0.0, 10.0);
  std::uniform_real_distribution<double> slack(-2.0, 10.0);
  std::uniform_int_distribution<int> proc(1, 8);
  int agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    vo::DecisionWindow w;
    const int n = size(gen);
    for (int i = 0; i < n; ++i) {
      const double a = std::round(arrival(gen) * 4.0) / 4.0;
      const double p = 0.25 * proc(gen);
      w.eligible.push_back(window_task(i, a, a + p + std::round(slack(gen) * 4.0) / 4.0, p));
    }
    std::shuffle(w.eligible.begin(), w.eligible.end(), gen);
    if (vo::schedule_cda(w, 10.0)->chosen_task_id == oracle::cda_argmin(w.eligible, 10.0)) ++agree;
  }
  const double t = clock.seconds();
  return {agree == 1000 && t < 10.0, cat(agree, "/1000 windows agree in ", t, " s")};
}

bool non_increasing(const vo::ConvergenceTrace& trace) {
  return std::is_sorted(trace.best_fitness.rbegin(), trace.best_fitness.rend());
}

// 7. convergence traces
Verdict convergence() {
  const auto measured = vo::ExecTimeMode::measured();
  int harder = 0;
  bool monotone = true;
  std::string finals;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = workload_scenario(200, seed);
    const auto off = vo::run_off_sta_pso(s, {}, measured, {});
    const auto on = vo::run_on_sta_pso(s, {}, measured, {});
    monotone = monotone && off.convergence && on.convergence && non_increasing(*off.convergence) &&
               non_increasing(*on.convergence);
    const double off_final = off.convergence->best_fitness.back();
    const double on_final = on.convergence->best_fitness.back();
    if (on_final >= off_final) ++harder;
    finals += cat(" s", seed, ":", off_final, "/", on_final);
  }
  // direct optimizer runs on slices of varying size
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20 && monotone; ++trial) {
    const auto s = oracle::random_scenario(gen(), 6 + trial, 8.0);
    vo::Timeline base(s.num_servers, s.link_model());
    const vo::SequenceSlice slice{s.tasks, base, 0.0, 0.0, true, {}};
    vo::PsoParams params;
    params.seed = gen();
    monotone = non_increasing(vo::pso_run(slice, params, vo::FitnessMode::Offline).trace);
  }
  return {monotone && harder >= 9,
          cat("traces non-increasing: ", monotone ? "yes" : "no", "; on_sta final >= off_sta final on ",
              harder, "/10 seeds (off/on:", finals, ")")};
}

// 8. byte-identical replays across processes
Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / ("vecoffload_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path scenario = dir / "scenario.json";
  const std::string cli = VECOFFLOAD_CLI_PATH;
  if (run_command(cli + " generate -n 50 --seed 3 -o " + scenario.string()) != 0) {
    return {false, "scenario generation failed"};
  }
  const std::string before = vo::read_file(scenario);
  int identical = 0;
  int total = 0;
  for (const auto kind : vo::all_scheduler_kinds()) {
    const std::string name(vo::to_string(kind));
    std::vector<std::string> outputs;
    for (int i = 0; i < 3; ++i) {
      const fs::path out = dir / cat(name, "_", i, ".json");
      if (run_command(cli + " replay " + scenario.string() + " -s " + name +
                      " --fixed-exec-time 0.01 -o " + out.string()) != 0) {
        return {false, "replay failed for " + name};
      }
      outputs.push_back(vo::read_file(out));
    }
    outputs.push_back(vo::metrics_to_json(vo::replay(scenario, kind, 0.01)));
    ++total;
    if (std::all_of(outputs.begin(), outputs.end(), [&](auto& o) { return o == outputs.front(); })) {
      ++identical;
    }
  }
  const bool untouched = vo::read_file(scenario) == before;
  fs::remove_all(dir);
  return {identical == total && untouched,
          cat(identical, "/", total, " schedulers byte-identical over 3 CLI runs and one in-process run",
              untouched ? "" : "; scenario file changed")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criteria to run (default: all)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::array<std::function<Verdict()>, 8> checks{
      formula_suite, brute_force_optimality, regime_ordering, execution_time_gap,
      bookkeeping,   cda_argmin,             convergence,     determinism};
  bool all = true;
  for (int c : selected) {
    Verdict v;
    try {
      v = checks[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << "criterion " << c << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail << std::endl;
  }
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
