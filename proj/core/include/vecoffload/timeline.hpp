#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "vecoffload/model.hpp"

namespace vecoffload {

// Radio side of a scenario: the channel plus each task's uplink time, which is
// fixed once the ready-for-transmission instants are known.
struct LinkModel {
  ChannelParams channel;
  std::vector<Seconds> uplink_by_id;
  Seconds concurrency_epsilon = 1e-9;

  Seconds uplink_time(TaskId id) const;
  // Downlink time of a result transmitted alone.
  Seconds solo_downlink_time(const Task& task) const;
};

// Commits `chosen` onto its server: logs [start, start + processing) and moves
// that server's availability to the interval end. Returns the new earliest
// availability over all servers. Throws InternalConsistencyError if the
// interval overlaps the server's previous work.
Seconds advance_after_assignment(std::span<MecState> servers, const TaskOutcome& chosen,
                                 Seconds processing_time);

// Sequential placement of tasks onto single-CPU MEC servers.
//
// A placement either commits (the task meets its deadline when started at the
// given instant) or records a drop that leaves the servers untouched. Downlink
// bandwidth is shared with already-committed tasks whose processing finishes
// at the same instant; committed records are never revised.
class Timeline {
 public:
  Timeline(std::size_t num_servers, std::shared_ptr<const LinkModel> link);

  std::span<const MecState> servers() const { return servers_; }
  std::span<const TaskOutcome> outcomes() const { return outcomes_; }
  const LinkModel& link() const { return *link_; }

  std::pair<ServerIndex, Seconds> earliest() const { return earliest_available(servers_); }

  // What placing `task` on `server` at `start` would produce, without committing.
  TaskOutcome evaluate(const Task& task, ServerIndex server, Seconds start) const;

  // Places on an explicit server at an explicit start time.
  const TaskOutcome& place_at(const Task& task, ServerIndex server, Seconds start);

  // Places on the earliest-available server at
  // max(server availability, arrival, not_before) + extra_delay.
  const TaskOutcome& place(const Task& task, Seconds not_before = 0.0, Seconds extra_delay = 0.0);

  const TaskOutcome& drop(const Task& task);

  // Copy without outcome history and without log entries that ended before
  // `horizon`; such entries can no longer share a downlink with future work.
  Timeline forked(Seconds horizon) const;

 private:
  Seconds downlink_time(const Task& task, ServerIndex server, Seconds completion) const;

  std::shared_ptr<const LinkModel> link_;
  std::vector<MecState> servers_;
  std::vector<TaskOutcome> outcomes_;
  // result_size_bits of each committed task, parallel to the server logs
  std::vector<std::vector<Bits>> result_sizes_;
};

}  // namespace vecoffload
