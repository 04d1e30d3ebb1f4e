#include "vecoffload/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "vecoffload/error.hpp"

namespace vecoffload {
namespace {

template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream out;
  out.precision(17);
  (out << ... << parts);
  return out.str();
}

void require_non_negative(double value, const char* what) {
  if (!(value >= 0.0)) {
    throw InvalidInput(concat(what, " must be >= 0, got ", value));
  }
}

}  // namespace

void validate(const Task& task) {
  if (!(task.size_bits > 0.0)) throw InvalidInput(concat("task ", task.id, ": size_bits must be > 0"));
  if (!(task.result_size_bits >= 0.0)) {
    throw InvalidInput(concat("task ", task.id, ": result_size_bits must be >= 0"));
  }
  if (!(task.processing_time > 0.0)) {
    throw InvalidInput(concat("task ", task.id, ": processing_time must be > 0"));
  }
  if (!(task.range_window > 0.0)) {
    throw InvalidInput(concat("task ", task.id, ": range_window must be > 0"));
  }
  if (!(task.deadline >= task.arrival_time)) {
    throw InvalidInput(concat("task ", task.id, ": deadline ", task.deadline, " precedes arrival ",
                              task.arrival_time));
  }
  if (!(task.offload_ready_time <= task.arrival_time)) {
    throw InvalidInput(concat("task ", task.id, ": offload_ready_time after arrival"));
  }
}

void validate(const ChannelParams& channel) {
  if (!(channel.guard_band_fraction >= 0.0 && channel.guard_band_fraction < 1.0)) {
    throw InvalidInput("guard_band_fraction must lie in [0, 1)");
  }
  if (!(channel.effective_bandwidth() > 0.0)) throw InvalidInput("effective bandwidth must be > 0");
  if (!(channel.tx_power_w > 0.0)) throw InvalidInput("tx_power_w must be > 0");
  if (!(channel.noise_power_w > 0.0)) throw InvalidInput("noise_power_w must be > 0");
  if (!(channel.channel_gain > 0.0)) throw InvalidInput("channel_gain must be > 0");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void validate(const ObjectiveWeights& weights) {
  if (!(weights.lambda >= 0.0 && weights.lambda <= 1.0)) {
    throw InvalidInput(concat("lambda must lie in [0, 1], got ", weights.lambda));
  }
}

Seconds waiting_time(Seconds start_processing, Seconds arrival) {
  const Seconds waited = start_processing - arrival;
  if (waited < 0.0) {
    throw ScenarioInconsistency(
        concat("processing starts at ", start_processing, " before arrival at ", arrival));
  }
  return waited;
}

Seconds computation_latency(Seconds processing, Seconds waiting) {
  require_non_negative(processing, "processing time");
  require_non_negative(waiting, "waiting time");
  return processing + waiting;
}

Hertz bandwidth_share(std::span<const Bits> concurrent_sizes, Hertz effective_bandwidth,
                      std::size_t index) {
  if (concurrent_sizes.empty()) throw InvalidInput("bandwidth_share: empty concurrent set");
  if (index >= concurrent_sizes.size()) {
    throw InvalidInput(concat("bandwidth_share: index ", index, " out of range ",
                              concurrent_sizes.size()));
  }
  Bits total = 0.0;
  for (Bits size : concurrent_sizes) {
    if (!(size > 0.0)) throw InvalidInput("bandwidth_share: task sizes must be > 0");
    total += size;
  }
  if (concurrent_sizes.size() == 1) return effective_bandwidth;
  return effective_bandwidth * concurrent_sizes[index] / total;
}

BitsPerSecond transmission_rate(Hertz bandwidth, const ChannelParams& channel) {
  if (!(bandwidth > 0.0)) throw InvalidInput(concat("bandwidth must be > 0, got ", bandwidth));
  const double snr = channel.snr();
  if (!(snr > 0.0)) throw InvalidInput("signal-to-noise term must be > 0");
  return bandwidth * std::log2(1.0 + snr);
}

Seconds transmission_time(Bits size, BitsPerSecond rate) {
  if (!(rate > 0.0)) throw InvalidInput(concat("transmission rate must be > 0, got ", rate));
  require_non_negative(size, "payload size");
  return size / rate;
}

Seconds e2e_latency(Seconds computation, Seconds uplink, Seconds downlink) {
  require_non_negative(computation, "computation latency");
  require_non_negative(uplink, "uplink time");
  require_non_negative(downlink, "downlink time");
  return computation + uplink + downlink;
}

bool is_assignable(Seconds e2e, Seconds range_window) { return e2e <= range_window; }

bool meets_window_deadline(Seconds waiting, Seconds range_window, Seconds processing,
                           Seconds communication) {
  return waiting <= range_window - processing - communication;
}

Seconds max_waiting_time(const Task& task) {
  return task.deadline - task.processing_time - task.arrival_time;
}

DropSummary drop_summary(std::span<const TaskOutcome> outcomes) {
  if (outcomes.empty()) throw InvalidInput("drop ratio of an empty outcome list");
  DropSummary summary;
  summary.total = outcomes.size();
  for (const auto& outcome : outcomes) {
    if (outcome.dropped) ++summary.dropped;
  }
  summary.ratio = static_cast<double>(summary.dropped) / static_cast<double>(summary.total);
  return summary;
}

double drop_ratio(std::span<const TaskOutcome> outcomes) { return drop_summary(outcomes).ratio; }

double objective_value(std::span<const TaskOutcome> outcomes, const ObjectiveWeights& weights) {
  Seconds latency_sum = 0.0;
  for (const auto& outcome : outcomes) {
    if (outcome.assigned()) latency_sum += outcome.e2e_latency;
  }
  return weights.lambda * latency_sum + (1.0 - weights.lambda) * drop_ratio(outcomes);
}

std::pair<ServerIndex, Seconds> earliest_available(std::span<const MecState> servers) {
  if (servers.empty()) throw InvalidInput("earliest_available: no servers");
  ServerIndex best = 0;
  for (ServerIndex i = 1; i < servers.size(); ++i) {
    if (servers[i].available_at < servers[best].available_at) best = i;
  }
  return {best, servers[best].available_at};
}

}  // namespace vecoffload
