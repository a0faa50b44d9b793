#pragma once

#include "flipcut/graph.hpp"

namespace flipcut {

struct OracleResult {
  Weight best_cut = 0;
  Labels best_labels;
  std::int64_t n_optima = 0;  // distinct optima up to label complementation
};

/// Exhaustive maximum cut for small instances. Vertex 0's label is fixed
/// (the cut is invariant under complementation), so 2^(|V|-1) labelings are
/// scanned with Gray-code incremental updates.
/// Throws std::invalid_argument when n_vertices exceeds max_vertices.
OracleResult brute_force_max_cut(const Graph& graph, int max_vertices = 26);

/// found / reference as a real. Throws std::invalid_argument when the
/// reference is not positive; report the raw cut instead in that case.
double approximation_ratio(Weight found_cut, Weight reference_cut);

}  // namespace flipcut
