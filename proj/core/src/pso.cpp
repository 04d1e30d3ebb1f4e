#include "vecoffload/pso.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "vecoffload/error.hpp"
#include "vecoffload/rng.hpp"

namespace vecoffload {
namespace {

void sort_by_key(std::span<const double> position, std::span<const Task> tasks,
                 std::vector<std::size_t>& order) {
  if (position.size() != tasks.size()) {
    throw InvalidInput("decode: " + std::to_string(position.size()) + " keys for " +
                       std::to_string(tasks.size()) + " tasks");
  }
  order.resize(tasks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (position[a] != position[b]) return position[a] < position[b];
    return tasks[a].id < tasks[b].id;
  });
}

Seconds earliest_start(const SequenceSlice& slice, FitnessMode mode) {
  return slice.release + (mode == FitnessMode::Online ? slice.exec_time : 0.0);
}

double score(const Timeline& timeline, const SequenceSlice& slice) {
  auto outcomes = timeline.outcomes();
  if (!slice.score_base) outcomes = outcomes.subspan(slice.base.outcomes().size());
  return objective_value(outcomes, slice.weights);
}

// Fitness of the order induced by `position`, without materializing task copies.
class KeyEvaluator {
 public:
  KeyEvaluator(const SequenceSlice& slice, FitnessMode mode)
      : slice_(slice), not_before_(earliest_start(slice, mode)) {}

  double operator()(std::span<const double> position) {
    sort_by_key(position, slice_.tasks, scratch_);
    Timeline timeline = slice_.base;
    for (std::size_t index : scratch_) timeline.place(slice_.tasks[index], not_before_);
    return score(timeline, slice_);
  }

 private:
  const SequenceSlice& slice_;
  Seconds not_before_;
  std::vector<std::size_t> scratch_;
};

}  // namespace

void validate(const PsoParams& params) {
  if (params.swarm_size < 2) throw ConfigError("swarm_size must be >= 2");
  if (params.max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (!(params.cognitive_coeff > 0.0 && params.social_coeff > 0.0)) {
    throw ConfigError("PSO coefficients must be > 0");
  }
  if (!(params.inertia > 0.0 && params.inertia <= 1.0)) {
    throw ConfigError("inertia must lie in (0, 1]");
  }
  if (!(params.initial_velocity >= 0.0 && params.velocity_limit > 0.0)) {
    throw ConfigError("velocity bounds must be positive");
  }
}

std::vector<Task> decode(std::span<const double> position, std::span<const Task> tasks) {
  std::vector<std::size_t> order;
  sort_by_key(position, tasks, order);
  std::vector<Task> sorted;
  sorted.reserve(order.size());
  for (std::size_t index : order) sorted.push_back(tasks[index]);
  return sorted;
}

Timeline replay_order(std::span<const Task> order, const SequenceSlice& slice, FitnessMode mode) {
  const Seconds not_before = earliest_start(slice, mode);
  Timeline timeline = slice.base;
  for (const Task& task : order) timeline.place(task, not_before);
  return timeline;
}

double fitness(std::span<const Task> order, const SequenceSlice& slice, FitnessMode mode) {
  return score(replay_order(order, slice, mode), slice);
}

PsoResult pso_run(const SequenceSlice& slice, const PsoParams& params, FitnessMode mode) {
  validate(params);
  const std::size_t dims = slice.tasks.size();
  if (dims == 0) throw InvalidInput("pso_run needs at least one task");

  Rng rng(params.seed);
  KeyEvaluator evaluate(slice, mode);

  std::vector<Particle> swarm(static_cast<std::size_t>(params.swarm_size));
  for (Particle& particle : swarm) {
    particle.position.resize(dims);
    particle.velocity.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      particle.position[d] = rng.uniform01();
      particle.velocity[d] = rng.uniform(-params.initial_velocity, params.initial_velocity);
    }
    particle.personal_best_position = particle.position;
    particle.personal_best_fitness = evaluate(particle.position);
  }

  std::size_t leader = 0;
  for (std::size_t i = 1; i < swarm.size(); ++i) {
    if (swarm[i].personal_best_fitness < swarm[leader].personal_best_fitness) leader = i;
  }
  std::vector<double> global_best = swarm[leader].personal_best_position;
  double global_best_fitness = swarm[leader].personal_best_fitness;

  PsoResult result;
  result.trace.best_fitness.push_back(global_best_fitness);

  // A single key has one ordering; nothing to search.
  const int iterations = dims == 1 ? 0 : params.max_iterations;
  for (int iteration = 0; iteration < iterations; ++iteration) {
    for (Particle& particle : swarm) {
      for (std::size_t d = 0; d < dims; ++d) {
        const double r1 = rng.uniform01();
        const double r2 = rng.uniform01();
        double v = params.inertia * particle.velocity[d] +
                   params.cognitive_coeff * r1 *
                       (particle.personal_best_position[d] - particle.position[d]) +
                   params.social_coeff * r2 * (global_best[d] - particle.position[d]);
        v = std::clamp(v, -params.velocity_limit, params.velocity_limit);
        particle.velocity[d] = v;
        particle.position[d] += v;
      }
      const double f = evaluate(particle.position);
      if (f < particle.personal_best_fitness) {
        particle.personal_best_fitness = f;
        particle.personal_best_position = particle.position;
      }
    }
    // Synchronous global-best update in particle-index order.
    for (const Particle& particle : swarm) {
      if (particle.personal_best_fitness < global_best_fitness) {
        global_best_fitness = particle.personal_best_fitness;
        global_best = particle.personal_best_position;
      }
    }
    result.trace.best_fitness.push_back(global_best_fitness);
  }

  result.best_order = decode(global_best, slice.tasks);
  result.best_fitness = global_best_fitness;
  return result;
}

}  // namespace vecoffload
