#pragma once

#include <cstdint>
#include <string>

#include "flipcut/graph.hpp"

namespace flipcut {

enum class WeightSet {
  ZeroPlusMinusOne,  // {0, -1, +1}
  ZeroOne,           // {0, 1}
};

/// Weight alphabet names used by CLI flags and dataset manifests:
/// "0pm1", "pm1", "01", "1" (the latter two of each pair exclude zero).
struct WeightSpec {
  WeightSet set = WeightSet::ZeroPlusMinusOne;
  bool nonzero_only = false;

  static WeightSpec parse(const std::string& name);
  std::string name() const;
};

/// Erdos-Renyi: each unordered pair is an edge independently with
/// probability edge_prob; weights drawn uniformly from the alphabet
/// (zero excluded when nonzero_only). Zero-weight edges stay in the
/// adjacency.
Graph generate_er(int n, double edge_prob, WeightSpec weights, std::uint64_t seed);

/// Barabasi-Albert: a complete seed on `attachment` vertices, then each new
/// vertex attaches to `attachment` distinct existing vertices with
/// probability proportional to degree. Always connected.
Graph generate_ba(int n, int attachment, WeightSpec weights, std::uint64_t seed);

}  // namespace flipcut
