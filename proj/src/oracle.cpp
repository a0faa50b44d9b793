#include "flipcut/oracle.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace flipcut {

OracleResult brute_force_max_cut(const Graph& graph, int max_vertices) {
  const int n = graph.n_vertices();
  if (n > max_vertices)
    throw std::invalid_argument("instance too large for exhaustive search: " + std::to_string(n) +
                                " > " + std::to_string(max_vertices) + " vertices");
  if (n == 0) return {0, {}, 1};

  Labels labels(n, 0);
  Weight cut = 0;  // all-zero labeling cuts nothing
  std::vector<Weight> peeks = compute_peeks(graph, labels);

  OracleResult best{cut, labels, 1};

  auto flip = [&](int v) {
    const Weight si = 2 * static_cast<Weight>(labels[v]) - 1;
    auto nb = graph.neighbors(v);
    auto ws = graph.weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const Weight sj = 2 * static_cast<Weight>(labels[nb[k]]) - 1;
      peeks[nb[k]] -= 2 * ws[k] * si * sj;
    }
    cut += peeks[v];
    peeks[v] = -peeks[v];
    labels[v] ^= 1u;
  };

  // Gray-code walk over labels 1..n-1; vertex 0 stays fixed at 0.
  const std::uint64_t total = n > 1 ? (1ull << (n - 1)) : 1ull;
  for (std::uint64_t i = 1; i < total; ++i) {
    flip(std::countr_zero(i) + 1);
    if (cut > best.best_cut) {
      best.best_cut = cut;
      best.best_labels = labels;
      best.n_optima = 1;
    } else if (cut == best.best_cut) {
      ++best.n_optima;
    }
  }
  return best;
}

double approximation_ratio(Weight found_cut, Weight reference_cut) {
  if (reference_cut <= 0)
    throw std::invalid_argument("reference cut must be positive for a ratio");
  return static_cast<double>(found_cut) / static_cast<double>(reference_cut);
}

}  // namespace flipcut
