#include "vecoffload/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vecoffload/error.hpp"

namespace vecoffload {

Seconds LinkModel::uplink_time(TaskId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= uplink_by_id.size()) {
    throw InvalidInput("no uplink time for task " + std::to_string(id));
  }
  return uplink_by_id[static_cast<std::size_t>(id)];
}

Seconds LinkModel::solo_downlink_time(const Task& task) const {
  if (task.result_size_bits <= 0.0) return 0.0;
  return transmission_time(task.result_size_bits,
                           transmission_rate(channel.effective_bandwidth(), channel));
}

Seconds advance_after_assignment(std::span<MecState> servers, const TaskOutcome& chosen,
                                 Seconds processing_time) {
  if (!chosen.assigned_mec) {
    throw InternalConsistencyError("advance_after_assignment: task " +
                                   std::to_string(chosen.task_id) + " is not assigned");
  }
  const ServerIndex target = *chosen.assigned_mec;
  if (target >= servers.size()) {
    throw InternalConsistencyError("advance_after_assignment: unknown server " +
                                   std::to_string(target));
  }
  MecState& server = servers[target];
  if (chosen.start_processing_time < server.available_at) {
    throw InternalConsistencyError("task " + std::to_string(chosen.task_id) +
                                   " overlaps earlier work on server " + std::to_string(target));
  }
  const Seconds end = chosen.start_processing_time + processing_time;
  server.assignment_log.push_back({chosen.task_id, chosen.start_processing_time, end});
  server.available_at = end;
  return earliest_available(servers).second;
}

Timeline::Timeline(std::size_t num_servers, std::shared_ptr<const LinkModel> link)
    : link_(std::move(link)), servers_(num_servers), result_sizes_(num_servers) {
  if (num_servers == 0) throw InvalidInput("a timeline needs at least one server");
  if (!link_) throw InvalidInput("a timeline needs a link model");
  for (ServerIndex i = 0; i < num_servers; ++i) servers_[i].server_id = i;
}

Seconds Timeline::downlink_time(const Task& task, ServerIndex server, Seconds completion) const {
  if (task.result_size_bits <= 0.0) return 0.0;
  // Results that become ready at the same instant share the downlink.
  std::vector<Bits> sizes;
  const Seconds eps = link_->concurrency_epsilon;
  for (ServerIndex other = 0; other < servers_.size(); ++other) {
    if (other == server) continue;
    const auto& log = servers_[other].assignment_log;
    auto it = std::lower_bound(log.begin(), log.end(), completion - eps,
                               [](const Assignment& a, Seconds t) { return a.end < t; });
    for (; it != log.end() && it->end <= completion + eps; ++it) {
      const Bits size = result_sizes_[other][static_cast<std::size_t>(it - log.begin())];
      if (size > 0.0) sizes.push_back(size);
    }
  }
  Hertz bandwidth = link_->channel.effective_bandwidth();
  if (!sizes.empty()) {
    sizes.insert(sizes.begin(), task.result_size_bits);
    bandwidth = bandwidth_share(sizes, bandwidth, 0);
  }
  return transmission_time(task.result_size_bits, transmission_rate(bandwidth, link_->channel));
}

Timeline Timeline::forked(Seconds horizon) const {
  Timeline copy(servers_.size(), link_);
  const Seconds cutoff = horizon - link_->concurrency_epsilon;
  for (ServerIndex i = 0; i < servers_.size(); ++i) {
    const auto& log = servers_[i].assignment_log;
    auto first = std::lower_bound(log.begin(), log.end(), cutoff,
                                  [](const Assignment& a, Seconds t) { return a.end < t; });
    const auto offset = static_cast<std::size_t>(first - log.begin());
    copy.servers_[i].available_at = servers_[i].available_at;
    copy.servers_[i].assignment_log.assign(first, log.end());
    copy.result_sizes_[i].assign(result_sizes_[i].begin() + static_cast<std::ptrdiff_t>(offset),
                                 result_sizes_[i].end());
  }
  return copy;
}

TaskOutcome Timeline::evaluate(const Task& task, ServerIndex server, Seconds start) const {
  if (server >= servers_.size()) {
    throw InvalidInput("evaluate: unknown server " + std::to_string(server));
  }
  TaskOutcome outcome;
  outcome.task_id = task.id;
  outcome.start_processing_time = start;
  outcome.waiting_time = waiting_time(start, task.arrival_time);
  outcome.uplink_time = link_->uplink_time(task.id);
  outcome.downlink_time = downlink_time(task, server, start + task.processing_time);
  outcome.e2e_latency =
      e2e_latency(computation_latency(task.processing_time, outcome.waiting_time),
                  outcome.uplink_time, outcome.downlink_time);
  outcome.dropped = !is_assignable(outcome.e2e_latency, task.range_window);
  if (!outcome.dropped) outcome.assigned_mec = server;
  return outcome;
}

const TaskOutcome& Timeline::place_at(const Task& task, ServerIndex server, Seconds start) {
  TaskOutcome outcome = evaluate(task, server, start);
  if (!outcome.assigned()) return drop(task);
  advance_after_assignment(servers_, outcome, task.processing_time);
  result_sizes_[server].push_back(task.result_size_bits);
  outcomes_.push_back(outcome);
  return outcomes_.back();
}

const TaskOutcome& Timeline::place(const Task& task, Seconds not_before, Seconds extra_delay) {
  const auto [server, available] = earliest();
  const Seconds start = std::max({available, task.arrival_time, not_before}) + extra_delay;
  return place_at(task, server, start);
}

const TaskOutcome& Timeline::drop(const Task& task) {
  TaskOutcome outcome;
  outcome.task_id = task.id;
  outcome.uplink_time = link_->uplink_time(task.id);
  outcome.dropped = true;
  outcomes_.push_back(outcome);
  return outcomes_.back();
}

}  // namespace vecoffload
