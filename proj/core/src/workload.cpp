#include "vecoffload/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vecoffload/error.hpp"
#include "vecoffload/rng.hpp"

namespace vecoffload {

double default_arrival_rate(int num_vehicles) { return static_cast<double>(num_vehicles) / 100.0; }

void validate(const WorkloadConfig& config) {
  if (config.num_vehicles < 2) throw ConfigError("num_vehicles must be >= 2");
  if (!(config.arrival_rate > 0.0)) throw ConfigError("arrival_rate must be > 0");
  if (config.task_size_choices.empty()) throw ConfigError("task_size_choices is empty");
  for (Bits size : config.task_size_choices) {
    if (!(size > 0.0)) throw ConfigError("task sizes must be > 0");
    auto it = config.processing_time_table.find(size);
    if (it == config.processing_time_table.end()) {
      throw ConfigError("no processing time for task size " + std::to_string(size));
    }
    if (!(it->second > 0.0)) throw ConfigError("processing times must be > 0");
  }
  if (!(config.coverage_radius > 0.0)) throw ConfigError("coverage_radius must be > 0");
  if (!(config.speed_range.min_mps > 0.0)) throw ConfigError("minimum speed must be > 0");
  if (!(config.speed_range.max_mps >= config.speed_range.min_mps)) {
    throw ConfigError("speed range is inverted");
  }
  if (!(config.approach_distance >= 0.0)) throw ConfigError("approach_distance must be >= 0");
  if (!(config.exit_margin >= 0.0 && config.exit_margin < 2.0 * config.coverage_radius)) {
    throw ConfigError("exit_margin must lie in [0, 2 * coverage_radius)");
  }
  if (!(config.result_size_ratio >= 0.0)) throw ConfigError("result_size_ratio must be >= 0");
  if (config.num_servers < 1) throw ConfigError("num_servers must be >= 1");
  try {
    validate(config.channel);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

void validate(const Scenario& scenario) {
  if (scenario.num_servers < 1) throw InvalidInput("scenario needs at least one server");
  validate(scenario.channel);
  for (std::size_t i = 0; i < scenario.tasks.size(); ++i) {
    const Task& task = scenario.tasks[i];
    if (task.id != static_cast<TaskId>(i)) {
      throw InvalidInput("task ids must be dense from 0 in arrival order; position " +
                         std::to_string(i) + " holds id " + std::to_string(task.id));
    }
    validate(task);
    if (i > 0 && task.arrival_time < scenario.tasks[i - 1].arrival_time) {
      throw InvalidInput("tasks are not sorted by arrival_time at position " + std::to_string(i));
    }
  }
}

std::shared_ptr<const LinkModel> Scenario::link_model() const {
  auto link = std::make_shared<LinkModel>();
  link->channel = channel;
  link->concurrency_epsilon = concurrency_epsilon;
  link->uplink_by_id = uplink_times(tasks, channel, concurrency_epsilon);
  return link;
}

CoverageWindow coverage_deadline(double position, double speed, double rsu_position,
                                 double radius, Seconds offload_time) {
  if (!(speed > 0.0)) throw InvalidInput("vehicle speed must be > 0");
  if (!(radius > 0.0)) throw InvalidInput("coverage radius must be > 0");
  const double entry_point = rsu_position - radius;
  const double exit_point = rsu_position + radius;
  if (!(position < exit_point)) {
    throw InvalidInput("vehicle at " + std::to_string(position) +
                       " m never enters coverage ending at " + std::to_string(exit_point) + " m");
  }
  const double start_point = std::max(position, entry_point);
  CoverageWindow window;
  window.ready_time = offload_time + (start_point - position) / speed;
  window.range_window = (exit_point - start_point) / speed;
  window.deadline = window.ready_time + window.range_window;
  return window;
}

std::vector<TaskId> concurrent_set(std::span<const Task> tasks, Seconds time, Seconds epsilon) {
  std::vector<TaskId> ids;
  for (const Task& task : tasks) {
    if (std::abs(task.offload_ready_time - time) <= epsilon) ids.push_back(task.id);
  }
  return ids;
}

std::vector<Seconds> uplink_times(std::span<const Task> tasks, const ChannelParams& channel,
                                  Seconds epsilon) {
  std::vector<Seconds> uplink(tasks.size(), 0.0);
  std::vector<Bits> size_by_id(tasks.size(), 0.0);
  for (const Task& task : tasks) {
    if (task.id < 0 || static_cast<std::size_t>(task.id) >= tasks.size()) {
      throw InvalidInput("task ids must be dense from 0; found " + std::to_string(task.id));
    }
    size_by_id[static_cast<std::size_t>(task.id)] = task.size_bits;
  }
  const Hertz bandwidth = channel.effective_bandwidth();
  for (const Task& task : tasks) {
    const std::vector<TaskId> group = concurrent_set(tasks, task.offload_ready_time, epsilon);
    std::vector<Bits> sizes;
    std::size_t self = 0;
    for (TaskId id : group) {
      if (id == task.id) self = sizes.size();
      sizes.push_back(size_by_id[static_cast<std::size_t>(id)]);
    }
    const Hertz share = bandwidth_share(sizes, bandwidth, self);
    uplink[static_cast<std::size_t>(task.id)] =
        transmission_time(task.size_bits, transmission_rate(share, channel));
  }
  return uplink;
}

Scenario generate_scenario(const WorkloadConfig& config) {
  validate(config);
  Rng rng(config.seed);

  const double low = config.rsu_position - config.coverage_radius - config.approach_distance;
  const double high = config.rsu_position + config.coverage_radius - config.exit_margin;

  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(config.num_vehicles));
  Seconds generated_at = 0.0;
  for (int vehicle = 0; vehicle < config.num_vehicles; ++vehicle) {
    generated_at += rng.exponential(config.arrival_rate);
    const double speed = rng.uniform(config.speed_range.min_mps, config.speed_range.max_mps);
    const double position = rng.uniform(low, high);
    const Bits size = config.task_size_choices[rng.index(config.task_size_choices.size())];
    const CoverageWindow window = coverage_deadline(position, speed, config.rsu_position,
                                                    config.coverage_radius, generated_at);
    Task task;
    task.id = vehicle;
    task.size_bits = size;
    task.result_size_bits = size * config.result_size_ratio;
    task.processing_time = config.processing_time_table.at(size);
    task.deadline = window.deadline;
    task.range_window = window.range_window;
    task.offload_ready_time = window.ready_time;
    tasks.push_back(task);
  }

  const std::vector<Seconds> uplink = uplink_times(tasks, config.channel);
  for (Task& task : tasks) {
    task.arrival_time = task.offload_ready_time + uplink[static_cast<std::size_t>(task.id)];
  }
  std::stable_sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
    return a.arrival_time < b.arrival_time;
  });
  for (std::size_t i = 0; i < tasks.size(); ++i) tasks[i].id = static_cast<TaskId>(i);

  Scenario scenario;
  scenario.tasks = std::move(tasks);
  scenario.channel = config.channel;
  scenario.num_servers = config.num_servers;
  scenario.seed = config.seed;
  scenario.config_echo = config;
  try {
    validate(scenario);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("workload produced an invalid task: ") + e.what());
  }
  return scenario;
}

}  // namespace vecoffload
