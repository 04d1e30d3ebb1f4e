#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vecoffload/error.hpp"
#include "vecoffload/workload.hpp"

namespace vo = vecoffload;

TEST(CoverageDeadline, EnteringAtTheEdgeSeesTheFullChord) {
  const auto w = vo::coverage_deadline(250.0, 25.0, 500.0, 250.0, 10.0);
  EXPECT_DOUBLE_EQ(w.range_window, 500.0 / 25.0);
  EXPECT_DOUBLE_EQ(w.ready_time, 10.0);
  EXPECT_DOUBLE_EQ(w.deadline, 30.0);
}

TEST(CoverageDeadline, AbreastOfTheRsuSeesHalf) {
  const auto w = vo::coverage_deadline(500.0, 25.0, 500.0, 250.0, 4.0);
  EXPECT_DOUBLE_EQ(w.range_window, 10.0);
  EXPECT_DOUBLE_EQ(w.deadline, 14.0);
}

TEST(CoverageDeadline, ApproachingVehicleWaitsForEntry) {
  const auto w = vo::coverage_deadline(150.0, 20.0, 500.0, 250.0, 1.0);
  EXPECT_DOUBLE_EQ(w.ready_time, 1.0 + 100.0 / 20.0);
  EXPECT_DOUBLE_EQ(w.range_window, 25.0);
  EXPECT_DOUBLE_EQ(w.deadline, w.ready_time + 25.0);
}

TEST(CoverageDeadline, NeverEntering) {
  EXPECT_THROW(vo::coverage_deadline(750.0, 20.0, 500.0, 250.0, 0.0), vo::InvalidInput);
  EXPECT_THROW(vo::coverage_deadline(900.0, 20.0, 500.0, 250.0, 0.0), vo::InvalidInput);
  EXPECT_THROW(vo::coverage_deadline(300.0, 0.0, 500.0, 250.0, 0.0), vo::InvalidInput);
}

TEST(ConcurrentSet, EmptySingleAndPair) {
  std::vector<vo::Task> tasks(3);
  for (int i = 0; i < 3; ++i) {
    tasks[static_cast<std::size_t>(i)].id = i;
    tasks[static_cast<std::size_t>(i)].size_bits = i == 0 ? 2160e3 : 3840e3;
  }
  tasks[0].offload_ready_time = 1.0;
  tasks[1].offload_ready_time = 1.0 + 5e-10;
  tasks[2].offload_ready_time = 2.0;
  EXPECT_TRUE(vo::concurrent_set(tasks, 0.5).empty());
  EXPECT_EQ(vo::concurrent_set(tasks, 2.0), std::vector<vo::TaskId>{2});
  EXPECT_EQ(vo::concurrent_set(tasks, 1.0), (std::vector<vo::TaskId>{0, 1}));

  const vo::ChannelParams channel;
  const auto up = vo::uplink_times(tasks, channel);
  const double b = channel.effective_bandwidth();
  const double share0 = b * 2160e3 / (2160e3 + 3840e3);
  EXPECT_NEAR(up[0], 2160e3 / vo::transmission_rate(share0, channel), 1e-12);
  EXPECT_NEAR(up[2], 3840e3 / vo::transmission_rate(b, channel), 1e-12);
  // equal airtime for a proportional split
  EXPECT_NEAR(up[0], up[1], 1e-12);
}

TEST(GenerateScenario, TwoVehicles) {
  vo::WorkloadConfig config;
  config.num_vehicles = 2;
  config.seed = 5;
  const auto s = vo::generate_scenario(config);
  ASSERT_EQ(s.tasks.size(), 2u);
  EXPECT_EQ(s.tasks[0].id, 0);
  EXPECT_EQ(s.tasks[1].id, 1);
  EXPECT_LE(s.tasks[0].arrival_time, s.tasks[1].arrival_time);
}

TEST(GenerateScenario, SameSeedSameScenario) {
  vo::WorkloadConfig config;
  config.seed = 42;
  EXPECT_EQ(vo::generate_scenario(config), vo::generate_scenario(config));
  auto other = config;
  other.seed = 43;
  EXPECT_NE(vo::generate_scenario(config).tasks, vo::generate_scenario(other).tasks);
}

TEST(GenerateScenario, InterArrivalMeanMatchesRate) {
  // With no approach distance every ready instant is a generation instant.
  vo::WorkloadConfig config;
  config.num_vehicles = 200;
  config.arrival_rate = 2.0;
  config.approach_distance = 0.0;  // every task is generated inside coverage
  double gap_sum = 0.0;
  int gaps = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    config.seed = seed;
    const auto s = vo::generate_scenario(config);
    std::vector<double> ready;
    for (const auto& t : s.tasks) ready.push_back(t.offload_ready_time);
    std::sort(ready.begin(), ready.end());
    gap_sum += ready.back() - ready.front();
    gaps += static_cast<int>(ready.size()) - 1;
  }
  EXPECT_NEAR(gap_sum / gaps, 1.0 / config.arrival_rate, 0.15 / config.arrival_rate);
}

TEST(GenerateScenario, RangeWindowsAreBoundedByTheChord) {
  vo::WorkloadConfig config;
  config.num_vehicles = 200;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    config.seed = seed;
    const auto s = vo::generate_scenario(config);
    const double bound = 2.0 * config.coverage_radius / config.speed_range.min_mps;
    for (const auto& t : s.tasks) {
      ASSERT_GT(t.range_window, 0.0);
      ASSERT_LE(t.range_window, bound);
    }
  }
}

TEST(GenerateScenario, StructuralInvariants) {
  vo::WorkloadConfig config;
  config.num_vehicles = 150;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    config.seed = seed;
    const auto s = vo::generate_scenario(config);
    ASSERT_EQ(s.tasks.size(), 150u);
    const auto up = oracle::uplinks(s.tasks, s.channel);
    for (std::size_t i = 0; i < s.tasks.size(); ++i) {
      const auto& t = s.tasks[i];
      ASSERT_EQ(t.id, static_cast<int>(i));
      if (i > 0) {
        ASSERT_GE(t.arrival_time, s.tasks[i - 1].arrival_time);
      }
      ASSERT_GE(t.deadline, t.arrival_time);
      ASSERT_NE(std::find(config.task_size_choices.begin(), config.task_size_choices.end(), t.size_bits),
                config.task_size_choices.end());
      ASSERT_EQ(t.processing_time, config.processing_time_table.at(t.size_bits));
      ASSERT_EQ(t.result_size_bits, t.size_bits);
      ASSERT_NEAR(t.arrival_time, t.offload_ready_time + up[i], 1e-9);
      ASSERT_NEAR(t.deadline, t.offload_ready_time + t.range_window, 1e-9);
    }
  }
}

TEST(WorkloadConfig, Validation) {
  vo::WorkloadConfig config;
  config.num_vehicles = 1;
  EXPECT_THROW(vo::generate_scenario(config), vo::ConfigError);
  config = {};
  config.task_size_choices.push_back(1234.0);
  EXPECT_THROW(vo::validate(config), vo::ConfigError);
  config = {};
  config.coverage_radius = 0.0;
  EXPECT_THROW(vo::validate(config), vo::ConfigError);
  config = {};
  config.speed_range = {0.0, 10.0};
  EXPECT_THROW(vo::validate(config), vo::ConfigError);
  EXPECT_DOUBLE_EQ(vo::default_arrival_rate(200), 2.0);
}

TEST(ScenarioValidation, RejectsUnsortedOrSparse) {
  auto s = oracle::random_scenario(3, 5);
  EXPECT_NO_THROW(vo::validate(s));
  auto sparse = s;
  sparse.tasks[2].id = 7;
  EXPECT_THROW(vo::validate(sparse), vo::InvalidInput);
  auto unsorted = s;
  std::swap(unsorted.tasks[1].arrival_time, unsorted.tasks[3].arrival_time);
  if (unsorted.tasks[1].arrival_time != unsorted.tasks[3].arrival_time) {
    EXPECT_THROW(vo::validate(unsorted), vo::InvalidInput);
  }
  auto serverless = s;
  serverless.num_servers = 0;
  EXPECT_THROW(vo::validate(serverless), vo::InvalidInput);
}
