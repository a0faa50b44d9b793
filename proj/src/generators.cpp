#include "flipcut/generators.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "flipcut/numeric.hpp"

namespace flipcut {

WeightSpec WeightSpec::parse(const std::string& name) {
  if (name == "0pm1") return {WeightSet::ZeroPlusMinusOne, false};
  if (name == "pm1") return {WeightSet::ZeroPlusMinusOne, true};
  if (name == "01") return {WeightSet::ZeroOne, false};
  if (name == "1") return {WeightSet::ZeroOne, true};
  throw std::invalid_argument("unknown weight set \"" + name + "\" (use 0pm1, pm1, 01, 1)");
}

std::string WeightSpec::name() const {
  if (set == WeightSet::ZeroPlusMinusOne) return nonzero_only ? "pm1" : "0pm1";
  return nonzero_only ? "1" : "01";
}

namespace {

Weight draw_weight(const WeightSpec& spec, std::mt19937_64& rng) {
  if (spec.set == WeightSet::ZeroPlusMinusOne) {
    if (spec.nonzero_only) return uniform_unit(rng) < 0.5 ? -1 : 1;
    const double u = uniform_unit(rng);
    return u < 1.0 / 3.0 ? -1 : (u < 2.0 / 3.0 ? 0 : 1);
  }
  if (spec.nonzero_only) return 1;
  return uniform_unit(rng) < 0.5 ? 0 : 1;
}

}  // namespace

Graph generate_er(int n, double edge_prob, WeightSpec weights, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("negative vertex count");
  if (edge_prob < 0.0 || edge_prob > 1.0)
    throw std::invalid_argument("edge probability must be in [0, 1]");
  std::mt19937_64 rng(seed);
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (uniform_unit(rng) < edge_prob) edges.push_back({i, j, draw_weight(weights, rng)});
  return Graph::from_edges(n, edges);
}

Graph generate_ba(int n, int attachment, WeightSpec weights, std::uint64_t seed) {
  if (attachment < 1 || attachment >= n)
    throw std::invalid_argument("attachment must satisfy 1 <= attachment < n");
  std::mt19937_64 rng(seed);
  std::vector<WeightedEdge> edges;
  std::vector<int> endpoints;  // one entry per edge endpoint; degree-proportional pool

  auto add_edge = [&](int u, int v) {
    edges.push_back({u, v, draw_weight(weights, rng)});
    endpoints.push_back(u);
    endpoints.push_back(v);
  };

  // complete seed graph on the first `attachment` vertices
  for (int i = 0; i < attachment; ++i)
    for (int j = i + 1; j < attachment; ++j) add_edge(i, j);

  for (int v = attachment; v < n; ++v) {
    std::unordered_set<int> chosen;
    int guard = 0;
    while (static_cast<int>(chosen.size()) < attachment) {
      int candidate;
      if (endpoints.empty() || ++guard > 64 * attachment) {
        // uniform fallback: degree pool empty (single-vertex seed) or the
        // rejection loop is starving on duplicates
        candidate = static_cast<int>(uniform_unit(rng) * v);
        candidate = std::min(candidate, v - 1);
      } else {
        candidate = endpoints[std::min(
            static_cast<std::size_t>(uniform_unit(rng) * endpoints.size()), endpoints.size() - 1)];
      }
      chosen.insert(candidate);
    }
    // deterministic order for the edge list regardless of set iteration
    std::vector<int> targets(chosen.begin(), chosen.end());
    std::sort(targets.begin(), targets.end());
    for (int u : targets) add_edge(u, v);
  }
  return Graph::from_edges(n, edges);
}

}  // namespace flipcut
