#include "flipcut/gset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "flipcut/common.hpp"

namespace flipcut {

Graph parse_gset(std::istream& in) {
  std::string line;
  int line_no = 0;

  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    if (required) throw ParseError("unexpected end of file", line_no);
    return false;
  };

  next_line(true);
  long long n = 0, m = 0;
  {
    std::istringstream ss(line);
    std::string extra;
    if (!(ss >> n >> m) || (ss >> extra) || n < 0 || m < 0)
      throw ParseError("expected header \"n m\"", line_no);
  }

  std::vector<WeightedEdge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(m) * 2);
  for (long long k = 0; k < m; ++k) {
    next_line(true);
    std::istringstream ss(line);
    long long u = 0, v = 0;
    Weight w = 0;
    std::string extra;
    if (!(ss >> u >> v >> w) || (ss >> extra))
      throw ParseError("expected edge \"u v w\"", line_no);
    if (u < 1 || u > n || v < 1 || v > n)
      throw ParseError("vertex index out of range", line_no);
    if (u == v) throw ParseError("self-loop", line_no);
    const std::uint64_t lo = static_cast<std::uint64_t>(std::min(u, v) - 1);
    const std::uint64_t hi = static_cast<std::uint64_t>(std::max(u, v) - 1);
    if (!seen.insert((hi << 32) | lo).second) throw ParseError("duplicate edge", line_no);
    edges.push_back({static_cast<int>(u - 1), static_cast<int>(v - 1), w});
  }
  if (next_line(false)) throw ParseError("trailing content after edge list", line_no);

  return Graph::from_edges(static_cast<int>(n), edges);
}

Graph parse_gset_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_gset(ss);
}

Graph load_gset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open instance file: " + path);
  return parse_gset(is);
}

void write_gset(std::ostream& out, const Graph& graph) {
  const auto edges = graph.edges();
  out << graph.n_vertices() << ' ' << edges.size() << '\n';
  for (const auto& e : edges) out << e.u + 1 << ' ' << e.v + 1 << ' ' << e.w << '\n';
}

void save_gset(const std::string& path, const Graph& graph) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write instance file: " + path);
  write_gset(os, graph);
  if (!os) throw std::runtime_error("instance write failed: " + path);
}

}  // namespace flipcut
