#pragma once

#include <cstdint>
#include <vector>

#include "flipcut/graph.hpp"

namespace flipcut {

struct HeuristicResult {
  Weight best_cut = 0;
  Labels best_labels;
  int steps_taken = 0;
};

struct SoftPolicyConfig {
  double temperature = 0.0;  // tau >= 0; 0 means exact argmax with lowest-index tie-break
  int max_steps = 0;
  int n_restarts = 1;
  std::uint64_t rng_seed = 0;
};

/// Greedy local search: flip the argmax-peek vertex while the max peek is
/// positive. Terminates at a local optimum or after max_steps flips.
/// The cut value is non-decreasing along the trajectory.
HeuristicResult mca_run(const Graph& graph, const Labels& initial_labels, int max_steps);

/// Stochastic variant: samples each flip from softmax(peeks / tau) and runs
/// exactly max_steps flips (it may pass through worse states), tracking the
/// best cut seen. tau = 0 degenerates to argmax selection without the
/// local-optimum stop.
HeuristicResult mca_soft_run(const Graph& graph, const Labels& initial_labels,
                             const SoftPolicyConfig& config);

/// Best over n_restarts random initial labelings; restart r uses rng stream
/// seed ^ r.
HeuristicResult mca_best_of_restarts(const Graph& graph, int n_restarts, int max_steps,
                                     std::uint64_t seed);
HeuristicResult mca_soft_best_of_restarts(const Graph& graph, const SoftPolicyConfig& config);

/// Grid search for the temperature maximizing the mean best cut over
/// graphs x restarts; ties break toward the smaller temperature.
/// `budget` supplies max_steps / n_restarts / rng_seed.
double tune_temperature(const std::vector<Graph>& graphs, const std::vector<double>& grid,
                        const SoftPolicyConfig& budget);

/// Same search run independently per instance.
std::vector<double> tune_temperature_per_instance(const std::vector<Graph>& graphs,
                                                  const std::vector<double>& grid,
                                                  const SoftPolicyConfig& budget);

}  // namespace flipcut
