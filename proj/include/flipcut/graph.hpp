#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flipcut {

using Weight = std::int64_t;
using Labels = std::vector<std::uint8_t>;  // one 0/1 entry per vertex

struct WeightedEdge {
  int u = 0;
  int v = 0;
  Weight w = 0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Immutable undirected graph in compressed sparse adjacency form.
///
/// Invariants: no self-loops, no duplicate edges, neighbor lists sorted by
/// neighbor index. Zero-weight edges are legal and kept in the adjacency
/// (they contribute to neighborhood sizes but not to cut arithmetic).
class Graph {
public:
  Graph() = default;

  /// Builds from an undirected edge list (each edge listed once, either
  /// orientation). Throws std::invalid_argument on self-loops, duplicates,
  /// or out-of-range endpoints.
  static Graph from_edges(int n_vertices, const std::vector<WeightedEdge>& edges);

  int n_vertices() const { return n_; }
  std::int64_t n_edges() const { return static_cast<std::int64_t>(nbr_.size()) / 2; }
  Weight total_abs_weight() const { return total_abs_weight_; }

  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

  std::span<const int> neighbors(int v) const {
    return {nbr_.data() + offsets_[v], static_cast<std::size_t>(degree(v))};
  }
  std::span<const Weight> weights(int v) const {
    return {wgt_.data() + offsets_[v], static_cast<std::size_t>(degree(v))};
  }

  /// Canonical edge list: u < v, sorted lexicographically.
  std::vector<WeightedEdge> edges() const;

  /// Content hash of the canonical form.
  std::uint64_t content_hash() const;

  friend bool operator==(const Graph&, const Graph&) = default;

private:
  int n_ = 0;
  std::vector<int> offsets_;  // n_ + 1
  std::vector<int> nbr_;
  std::vector<Weight> wgt_;
  Weight total_abs_weight_ = 0;
};

/// Exact cut value of a labeling: total weight of edges whose endpoints
/// carry opposite labels.
Weight cut_value(const Graph& graph, const Labels& labels);

/// Peek vector: peeks[i] is the exact change in cut value if vertex i alone
/// were flipped. Isolated vertices get 0.
std::vector<Weight> compute_peeks(const Graph& graph, const Labels& labels);

}  // namespace flipcut
