#pragma once

#include <iosfwd>
#include <string>

#include "flipcut/graph.hpp"

namespace flipcut {

/// Plain-text edge-list format: a header "n m", then m lines "u v w" with
/// 1-indexed vertices and integer weights. Parsing rejects self-loops,
/// duplicate edges, and out-of-range indices with the offending line number.
Graph parse_gset(std::istream& in);
Graph parse_gset_string(const std::string& text);
Graph load_gset(const std::string& path);

/// Canonical form: edges sorted with u < v, 1-indexed on output.
void write_gset(std::ostream& out, const Graph& graph);
void save_gset(const std::string& path, const Graph& graph);

}  // namespace flipcut
