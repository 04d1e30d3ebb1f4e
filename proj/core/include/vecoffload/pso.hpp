#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vecoffload/model.hpp"
#include "vecoffload/timeline.hpp"

namespace vecoffload {

struct PsoParams {
  int swarm_size = 50;
  int max_iterations = 100;
  double cognitive_coeff = 1.49;
  double social_coeff = 1.49;
  double inertia = 0.729;
  std::uint64_t seed = 7;
  double initial_velocity = 0.5;  // velocities start uniform in [-v, v]
  double velocity_limit = 1.0;    // per-dimension clamp

  friend bool operator==(const PsoParams&, const PsoParams&) = default;
};

void validate(const PsoParams& params);

// Random-key particle: one real key per task; sorting the keys yields the order.
struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> personal_best_position;
  double personal_best_fitness = 0.0;
};

// Global-best fitness after initialization (entry 0) and after each iteration.
struct ConvergenceTrace {
  std::vector<double> best_fitness;
};

enum class FitnessMode { Offline, Online };

// The part of a schedule a swarm is allowed to reorder.
struct SequenceSlice {
  std::vector<Task> tasks;  // tasks to order
  Timeline base;            // committed state the slice starts from
  Seconds release = 0.0;    // no slice task starts before this instant
  Seconds exec_time = 0.0;  // decision latency charged in online mode
  bool score_base = true;   // whether base outcomes count towards the objective
  ObjectiveWeights weights;
};

// Tasks sorted by ascending key; equal keys keep the lower id first.
std::vector<Task> decode(std::span<const double> position, std::span<const Task> tasks);

// Places `order` one task at a time onto the earliest-available server of a
// copy of slice.base. Online mode delays every start to release + exec_time.
Timeline replay_order(std::span<const Task> order, const SequenceSlice& slice, FitnessMode mode);

// Weighted latency/drop objective of replay_order's result.
double fitness(std::span<const Task> order, const SequenceSlice& slice, FitnessMode mode);

struct PsoResult {
  std::vector<Task> best_order;
  double best_fitness = 0.0;
  ConvergenceTrace trace;
};

// Inertia-weight global-best PSO over random keys. Deterministic for a seed.
PsoResult pso_run(const SequenceSlice& slice, const PsoParams& params, FitnessMode mode);

}  // namespace vecoffload
