#include "flipcut/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "flipcut/common.hpp"

namespace flipcut {

Graph Graph::from_edges(int n_vertices, const std::vector<WeightedEdge>& edges) {
  if (n_vertices < 0) throw std::invalid_argument("negative vertex count");

  // Validate and canonicalize to u < v before building adjacency.
  std::vector<WeightedEdge> canon;
  canon.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n_vertices || e.v < 0 || e.v >= n_vertices)
      throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(e.u) + ", " +
                                  std::to_string(e.v) + ")");
    if (e.u == e.v) throw std::invalid_argument("self-loop at vertex " + std::to_string(e.u));
    canon.push_back(e.u < e.v ? e : WeightedEdge{e.v, e.u, e.w});
  }
  std::sort(canon.begin(), canon.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  for (std::size_t i = 1; i < canon.size(); ++i) {
    if (canon[i].u == canon[i - 1].u && canon[i].v == canon[i - 1].v)
      throw std::invalid_argument("duplicate edge (" + std::to_string(canon[i].u) + ", " +
                                  std::to_string(canon[i].v) + ")");
  }

  Graph g;
  g.n_ = n_vertices;
  g.offsets_.assign(n_vertices + 1, 0);
  for (const auto& e : canon) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (int v = 0; v < n_vertices; ++v) g.offsets_[v + 1] += g.offsets_[v];

  g.nbr_.resize(canon.size() * 2);
  g.wgt_.resize(canon.size() * 2);
  std::vector<int> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : canon) {
    g.nbr_[cursor[e.u]] = e.v;
    g.wgt_[cursor[e.u]++] = e.w;
    g.nbr_[cursor[e.v]] = e.u;
    g.wgt_[cursor[e.v]++] = e.w;
    g.total_abs_weight_ += std::abs(e.w);
  }
  // canon is sorted, so each neighbor list comes out sorted as well.
  return g;
}

std::vector<WeightedEdge> Graph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(nbr_.size() / 2);
  for (int u = 0; u < n_; ++u) {
    auto nb = neighbors(u);
    auto ws = weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (u < nb[k]) out.push_back({u, nb[k], ws[k]});
  }
  return out;
}

std::uint64_t Graph::content_hash() const {
  std::uint64_t h = fnv1a(&n_, sizeof(n_));
  for (const auto& e : edges()) {
    h = fnv1a(&e.u, sizeof(e.u), h);
    h = fnv1a(&e.v, sizeof(e.v), h);
    h = fnv1a(&e.w, sizeof(e.w), h);
  }
  return h;
}

Weight cut_value(const Graph& graph, const Labels& labels) {
  if (static_cast<int>(labels.size()) != graph.n_vertices())
    throw std::invalid_argument("labels length does not match vertex count");
  Weight cut = 0;
  for (int u = 0; u < graph.n_vertices(); ++u) {
    auto nb = graph.neighbors(u);
    auto ws = graph.weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (u < nb[k] && labels[u] != labels[nb[k]]) cut += ws[k];
    }
  }
  return cut;
}

std::vector<Weight> compute_peeks(const Graph& graph, const Labels& labels) {
  if (static_cast<int>(labels.size()) != graph.n_vertices())
    throw std::invalid_argument("labels length does not match vertex count");
  std::vector<Weight> peeks(graph.n_vertices(), 0);
  for (int u = 0; u < graph.n_vertices(); ++u) {
    const Weight su = 2 * static_cast<Weight>(labels[u]) - 1;
    auto nb = graph.neighbors(u);
    auto ws = graph.weights(u);
    Weight acc = 0;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const Weight sv = 2 * static_cast<Weight>(labels[nb[k]]) - 1;
      acc += ws[k] * su * sv;
    }
    peeks[u] = acc;
  }
  return peeks;
}

}  // namespace flipcut
