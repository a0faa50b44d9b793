#include "flipcut/cut_state.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace flipcut {

CutState make_cut_state(const Graph& graph, Labels labels) {
  CutState s;
  s.cut_value = cut_value(graph, labels);  // validates label length
  s.peeks = compute_peeks(graph, labels);
  s.labels = std::move(labels);
  s.last_flip_step.assign(graph.n_vertices(), -1);
  s.step = 0;
  s.best_cut = s.cut_value;
  s.best_labels = s.labels;
  return s;
}

Labels random_labels(int n_vertices, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Labels labels(n_vertices);
  for (auto& z : labels) z = static_cast<std::uint8_t>(rng() & 1u);
  return labels;
}

void apply_flip(CutState& state, const Graph& graph, int vertex) {
  if (vertex < 0 || vertex >= graph.n_vertices())
    throw std::out_of_range("flip vertex out of range");

  const Weight si = 2 * static_cast<Weight>(state.labels[vertex]) - 1;  // pre-flip sign
  auto nb = graph.neighbors(vertex);
  auto ws = graph.weights(vertex);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const int j = nb[k];
    const Weight sj = 2 * static_cast<Weight>(state.labels[j]) - 1;
    state.peeks[j] -= 2 * ws[k] * si * sj;
  }

  state.cut_value += state.peeks[vertex];
  state.peeks[vertex] = -state.peeks[vertex];
  state.labels[vertex] ^= 1u;
  state.last_flip_step[vertex] = state.step;
  ++state.step;

  if (state.cut_value > state.best_cut) {
    state.best_cut = state.cut_value;
    state.best_labels = state.labels;
  }
}

Observation observe(const CutState& state, const Graph& graph, int episode_budget) {
  if (episode_budget <= 0) throw std::invalid_argument("episode budget must be positive");
  const int n = graph.n_vertices();
  const double inv_n = 1.0 / n;

  Observation obs;
  obs.per_vertex.resize(n, 3);
  Weight max_peek = std::numeric_limits<Weight>::min();
  for (int i = 0; i < n; ++i) {
    obs.per_vertex(i, 0) = static_cast<double>(state.labels[i]);
    obs.per_vertex(i, 1) = static_cast<double>(state.peeks[i]) * inv_n;
    const std::int32_t last = state.last_flip_step[i];
    if (last < 0) {
      obs.per_vertex(i, 2) = 1.0;
    } else {
      const std::int32_t since = std::min(state.step - last, episode_budget);
      obs.per_vertex(i, 2) = static_cast<double>(since) / episode_budget;
    }
    max_peek = std::max(max_peek, state.peeks[i]);
  }
  obs.global[0] = static_cast<double>(state.best_cut - state.cut_value) * inv_n;
  obs.global[1] = n > 0 ? static_cast<double>(max_peek) * inv_n : 0.0;
  return obs;
}

Eigen::Vector2d observe_global(const CutState& state, const Graph& graph) {
  const int n = graph.n_vertices();
  Weight max_peek = std::numeric_limits<Weight>::min();
  for (int i = 0; i < n; ++i) max_peek = std::max(max_peek, state.peeks[i]);
  Eigen::Vector2d g;
  g[0] = static_cast<double>(state.best_cut - state.cut_value) / n;
  g[1] = n > 0 ? static_cast<double>(max_peek) / n : 0.0;
  return g;
}

double reward(const CutState& state_after_flip, Weight prev_best, int n_vertices) {
  if (n_vertices <= 0) throw std::invalid_argument("vertex count must be positive");
  const double delta = static_cast<double>(state_after_flip.cut_value - prev_best) / n_vertices;
  return std::max(delta, 0.0);
}

}  // namespace flipcut
