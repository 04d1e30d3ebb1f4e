#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "vecoffload/model.hpp"
#include "vecoffload/timeline.hpp"

namespace vecoffload {

struct SpeedRange {
  double min_mps = 22.0;
  double max_mps = 33.0;

  friend bool operator==(const SpeedRange&, const SpeedRange&) = default;
};

// Synthetic one-RSU highway workload. One task per vehicle.
//
// The Poisson rate, vehicle speeds, coverage geometry and the processing-time
// table are calibration knobs, not measured values. Defaults are sized so the
// two servers run near saturation at 100 vehicles and deadlines bind hard at
// 200.
struct WorkloadConfig {
  int num_vehicles = 100;
  double arrival_rate = 1.0;  // task generations per second
  std::vector<Bits> task_size_choices{2160e3, 3840e3, 6000e3, 8640e3};
  std::map<Bits, Seconds> processing_time_table{
      {2160e3, 0.8}, {3840e3, 1.4}, {6000e3, 2.2}, {8640e3, 3.2}};
  double rsu_position = 500.0;    // meters along the highway
  double coverage_radius = 250.0; // meters
  SpeedRange speed_range;
  // Tasks may be generated up to this many meters before coverage entry...
  double approach_distance = 100.0;
  // ...and never inside the last exit_margin meters of coverage.
  double exit_margin = 50.0;
  double result_size_ratio = 1.0;  // downlink payload / uplink payload
  ChannelParams channel;
  std::size_t num_servers = 2;
  std::uint64_t seed = 1;

  friend bool operator==(const WorkloadConfig&, const WorkloadConfig&) = default;
};

// Rate that spreads the fleet over roughly 100 simulated seconds.
double default_arrival_rate(int num_vehicles);

void validate(const WorkloadConfig& config);

struct Scenario {
  std::vector<Task> tasks;  // sorted by arrival, ids dense from 0
  ChannelParams channel;
  std::size_t num_servers = 2;
  std::uint64_t seed = 0;
  Seconds concurrency_epsilon = 1e-9;
  std::optional<WorkloadConfig> config_echo;

  // Uplink times derived from the tasks' ready-for-transmission instants.
  std::shared_ptr<const LinkModel> link_model() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Throws InvalidInput describing the first violated invariant.
void validate(const Scenario& scenario);

struct CoverageWindow {
  Seconds deadline = 0.0;
  Seconds range_window = 0.0;
  Seconds ready_time = 0.0;  // when the vehicle is inside coverage and can transmit
};

// Deadline of a task offloaded at `offload_time` by a vehicle at `position`
// moving with `speed` along the highway axis. The window runs from the point
// the vehicle is (or will first be) inside coverage to the coverage exit.
CoverageWindow coverage_deadline(double position, double speed, double rsu_position,
                                 double radius, Seconds offload_time);

// Ids of tasks whose offload_ready_time equals `time` within `epsilon`.
std::vector<TaskId> concurrent_set(std::span<const Task> tasks, Seconds time,
                                   Seconds epsilon = 1e-9);

// Uplink time of every task (indexed by id) with bandwidth split among tasks
// that become ready simultaneously.
std::vector<Seconds> uplink_times(std::span<const Task> tasks, const ChannelParams& channel,
                                  Seconds epsilon = 1e-9);

Scenario generate_scenario(const WorkloadConfig& config);

}  // namespace vecoffload
