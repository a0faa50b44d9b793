#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "flipcut/graph.hpp"

namespace flipcut {

/// Mutable search state over a fixed graph: the labeling plus exact cached
/// cut value and peeks, maintained incrementally under single-vertex flips.
/// Single-writer; parallel trajectories own disjoint instances.
struct CutState {
  Labels labels;
  Weight cut_value = 0;
  std::vector<Weight> peeks;
  std::vector<std::int32_t> last_flip_step;  // -1 = never flipped
  std::int32_t step = 0;
  Weight best_cut = 0;
  Labels best_labels;
};

/// Initializes cached quantities from scratch for the given labeling.
CutState make_cut_state(const Graph& graph, Labels labels);

/// Uniform random labeling.
Labels random_labels(int n_vertices, std::uint64_t seed);

/// Flips one vertex, updating cut value and peeks in O(deg(vertex)).
/// Only the flipped vertex and its neighbors are touched.
void apply_flip(CutState& state, const Graph& graph, int vertex);

/// Per-vertex and global features of the current state, normalized for the
/// learned policy. Column 1 (peeks) divides by |V|; denormalize_peek inverts
/// it exactly.
struct Observation {
  Eigen::MatrixXd per_vertex;  // |V| x 3: label, peek / |V|, steps-since-flip fraction
  Eigen::Vector2d global;      // (best - current cut) / |V|, max peek / |V|
};

Observation observe(const CutState& state, const Graph& graph, int episode_budget);

/// Just the 2-vector global part of observe (cheaper; no per-vertex matrix).
Eigen::Vector2d observe_global(const CutState& state, const Graph& graph);

inline Weight denormalize_peek(double normalized, int n_vertices) {
  return static_cast<Weight>(std::llround(normalized * n_vertices));
}

/// Normalized, clipped improvement of the best cut: max((cut - prev_best) / |V|, 0).
double reward(const CutState& state_after_flip, Weight prev_best, int n_vertices);

}  // namespace flipcut
