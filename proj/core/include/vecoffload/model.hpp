#pragma once

// Domain types and the closed-form latency, bandwidth, deadline and objective
// arithmetic shared by every scheduler. Everything here is a pure function of
// its arguments.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace vecoffload {

using Seconds = double;
using Bits = double;
using Hertz = double;
using BitsPerSecond = double;
using TaskId = int;
using ServerIndex = std::size_t;

inline constexpr double kBitsPerKilobit = 1000.0;

// One offloadable unit of work. All times are absolute simulation seconds.
struct Task {
  TaskId id = 0;
  Bits size_bits = 0.0;           // uplink payload
  Bits result_size_bits = 0.0;    // downlink payload
  Seconds arrival_time = 0.0;     // arrival at the RSU
  Seconds processing_time = 0.0;  // service time on one MEC CPU
  Seconds deadline = 0.0;         // absolute time the result must be back at the vehicle
  Seconds range_window = 0.0;     // coverage-entry to deadline span
  Seconds offload_ready_time = 0.0;

  friend bool operator==(const Task&, const Task&) = default;
};

// Throws InvalidInput if the task violates its own invariants.
void validate(const Task& task);

struct TaskOutcome {
  TaskId task_id = 0;
  std::optional<ServerIndex> assigned_mec;
  Seconds start_processing_time = 0.0;
  Seconds waiting_time = 0.0;
  Seconds uplink_time = 0.0;
  Seconds downlink_time = 0.0;
  Seconds e2e_latency = 0.0;
  bool dropped = true;

  bool assigned() const { return assigned_mec.has_value(); }

  friend bool operator==(const TaskOutcome&, const TaskOutcome&) = default;
};

struct Assignment {
  TaskId task_id = 0;
  Seconds start = 0.0;
  Seconds end = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// One single-CPU MEC server. available_at is the end of the last logged interval.
struct MecState {
  ServerIndex server_id = 0;
  Seconds available_at = 0.0;
  std::vector<Assignment> assignment_log;

  friend bool operator==(const MecState&, const MecState&) = default;
};

struct ChannelParams {
  Hertz max_bandwidth_hz = 20e6;
  double guard_band_fraction = 0.046;
  double tx_power_w = 0.2;
  double channel_gain = 1.55e-11;
  double noise_power_w = 1e-13;  // -100 dBm

  Hertz effective_bandwidth() const { return max_bandwidth_hz * (1.0 - guard_band_fraction); }
  double snr() const { return tx_power_w * channel_gain / noise_power_w; }

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

void validate(const ChannelParams& channel);

// Converts a power level in dBm to watts.
double dbm_to_watts(double dbm);

struct ObjectiveWeights {
  double lambda = 0.4;

  friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

void validate(const ObjectiveWeights& weights);

// ---------------------------------------------------------------------------
// Latency arithmetic

// Time spent queued at the RSU. Throws ScenarioInconsistency if start < arrival.
Seconds waiting_time(Seconds start_processing, Seconds arrival);

Seconds computation_latency(Seconds processing, Seconds waiting);

// Proportional split of the effective bandwidth among tasks that become ready
// for transmission at the same instant; a lone sender gets all of it.
Hertz bandwidth_share(std::span<const Bits> concurrent_sizes, Hertz effective_bandwidth,
                      std::size_t index);

// Shannon rate with the constant-parameter SNR of the channel.
BitsPerSecond transmission_rate(Hertz bandwidth, const ChannelParams& channel);

Seconds transmission_time(Bits size, BitsPerSecond rate);

Seconds e2e_latency(Seconds computation, Seconds uplink, Seconds downlink);

// Deadline feasibility; the boundary counts as feasible.
bool is_assignable(Seconds e2e, Seconds range_window);

// Decision-window eligibility: waiting <= range - processing - communication.
bool meets_window_deadline(Seconds waiting, Seconds range_window, Seconds processing,
                           Seconds communication);

// Longest queueing delay the task tolerates (deadline - processing - arrival).
// Negative means the task is already infeasible.
Seconds max_waiting_time(const Task& task);

// ---------------------------------------------------------------------------
// Aggregates over outcomes

struct DropSummary {
  std::size_t dropped = 0;
  std::size_t total = 0;
  double ratio = 0.0;
};

// Dropped fraction of outcomes, with the raw count alongside.
DropSummary drop_summary(std::span<const TaskOutcome> outcomes);
double drop_ratio(std::span<const TaskOutcome> outcomes);

// lambda * (sum of e2e over assigned) + (1 - lambda) * drop_ratio.
double objective_value(std::span<const TaskOutcome> outcomes, const ObjectiveWeights& weights);

// Index and time of the server that frees up first; ties go to the lowest index.
std::pair<ServerIndex, Seconds> earliest_available(std::span<const MecState> servers);

}  // namespace vecoffload
