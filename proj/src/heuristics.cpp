#include "flipcut/heuristics.hpp"

#include <random>
#include <stdexcept>

#include "flipcut/common.hpp"
#include "flipcut/cut_state.hpp"
#include "flipcut/numeric.hpp"

namespace flipcut {

namespace {

int argmax_peek(const std::vector<Weight>& peeks) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(peeks.size()); ++i)
    if (peeks[i] > peeks[best]) best = i;
  return best;
}

}  // namespace

HeuristicResult mca_run(const Graph& graph, const Labels& initial_labels, int max_steps) {
  CutState state = make_cut_state(graph, initial_labels);
  int steps = 0;
  while (steps < max_steps && graph.n_vertices() > 0) {
    const int v = argmax_peek(state.peeks);
    if (state.peeks[v] <= 0) break;  // local optimum
    apply_flip(state, graph, v);
    ++steps;
  }
  return {state.best_cut, state.best_labels, steps};
}

HeuristicResult mca_soft_run(const Graph& graph, const Labels& initial_labels,
                             const SoftPolicyConfig& config) {
  if (config.temperature < 0.0) throw std::invalid_argument("temperature must be non-negative");
  CutState state = make_cut_state(graph, initial_labels);
  std::mt19937_64 rng(config.rng_seed);

  const int n = graph.n_vertices();
  Eigen::VectorXd logits(n);
  int steps = 0;
  for (; steps < config.max_steps && n > 0; ++steps) {
    int v;
    if (config.temperature == 0.0) {
      v = argmax_peek(state.peeks);
    } else {
      for (int i = 0; i < n; ++i) logits[i] = static_cast<double>(state.peeks[i]);
      v = sample_index(softmax_with_temperature(logits, config.temperature), rng);
    }
    apply_flip(state, graph, v);
  }
  return {state.best_cut, state.best_labels, steps};
}

HeuristicResult mca_best_of_restarts(const Graph& graph, int n_restarts, int max_steps,
                                     std::uint64_t seed) {
  HeuristicResult best;
  bool first = true;
  for (int r = 0; r < n_restarts; ++r) {
    const std::uint64_t stream = seed ^ static_cast<std::uint64_t>(r);
    auto result = mca_run(graph, random_labels(graph.n_vertices(), stream), max_steps);
    if (first || result.best_cut > best.best_cut) {
      best = std::move(result);
      first = false;
    }
  }
  return best;
}

HeuristicResult mca_soft_best_of_restarts(const Graph& graph, const SoftPolicyConfig& config) {
  HeuristicResult best;
  bool first = true;
  for (int r = 0; r < config.n_restarts; ++r) {
    SoftPolicyConfig run = config;
    run.rng_seed = config.rng_seed ^ static_cast<std::uint64_t>(r);
    auto result =
        mca_soft_run(graph, random_labels(graph.n_vertices(), mix_seed(run.rng_seed, 1)), run);
    if (first || result.best_cut > best.best_cut) {
      best = std::move(result);
      first = false;
    }
  }
  return best;
}

namespace {

double mean_best_cut(const std::vector<Graph>& graphs, double tau, const SoftPolicyConfig& budget) {
  double total = 0.0;
  for (const auto& g : graphs) {
    SoftPolicyConfig cfg = budget;
    cfg.temperature = tau;
    total += static_cast<double>(mca_soft_best_of_restarts(g, cfg).best_cut);
  }
  return total / static_cast<double>(graphs.size());
}

}  // namespace

double tune_temperature(const std::vector<Graph>& graphs, const std::vector<double>& grid,
                        const SoftPolicyConfig& budget) {
  if (grid.empty()) throw std::invalid_argument("temperature grid is empty");
  if (graphs.empty()) throw std::invalid_argument("no graphs to tune on");

  double best_tau = grid.front();
  double best_mean = mean_best_cut(graphs, grid.front(), budget);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double mean = mean_best_cut(graphs, grid[i], budget);
    if (mean > best_mean || (mean == best_mean && grid[i] < best_tau)) {
      best_mean = mean;
      best_tau = grid[i];
    }
  }
  return best_tau;
}

std::vector<double> tune_temperature_per_instance(const std::vector<Graph>& graphs,
                                                  const std::vector<double>& grid,
                                                  const SoftPolicyConfig& budget) {
  std::vector<double> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(tune_temperature({g}, grid, budget));
  return out;
}

}  // namespace flipcut
