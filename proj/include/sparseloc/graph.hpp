#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "sparseloc/errors.hpp"
#include "sparseloc/measure.hpp"

namespace sparseloc {

/// Simple undirected graph on at most 24 vertices, stored as per-vertex
/// neighbor bitmasks so vertex subsets compose with State masks.
class Graph {
 public:
  explicit Graph(int n) : n_(n), adj_(static_cast<std::size_t>(n), 0) {
    if (n < 1 || n > kMaxCoordinates)
      throw std::invalid_argument("Graph: vertex count must be in [1, 24]");
  }

  void add_edge(int u, int v) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
      throw std::invalid_argument("Graph: vertex out of range");
    if (u == v) throw std::invalid_argument("Graph: self-loop rejected");
    if ((adj_[static_cast<std::size_t>(u)] >> v) & 1u)
      throw std::invalid_argument("Graph: duplicate edge rejected");
    adj_[static_cast<std::size_t>(u)] |= std::uint32_t{1} << v;
    adj_[static_cast<std::size_t>(v)] |= std::uint32_t{1} << u;
    ++edges_;
  }

  int n() const { return n_; }
  int num_edges() const { return edges_; }
  std::uint32_t neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  bool has_edge(int u, int v) const { return (adj_[static_cast<std::size_t>(u)] >> v) & 1u; }
  int degree(int v) const { return std::popcount(adj_[static_cast<std::size_t>(v)]); }

  std::vector<int> neighbor_list(int v) const {
    std::vector<int> out;
    for (int u = 0; u < n_; ++u)
      if (has_edge(v, u)) out.push_back(u);
    return out;
  }

  int max_degree() const {
    int d = 0;
    for (int v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  std::uint32_t all_vertices_mask() const {
    return n_ == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n_) - 1;
  }

  /// Union of neighborhoods of the vertices in the mask.
  std::uint32_t neighborhood(std::uint32_t set) const {
    std::uint32_t nb = 0;
    while (set) {
      const int v = std::countr_zero(set);
      set &= set - 1;
      nb |= adj_[static_cast<std::size_t>(v)];
    }
    return nb;
  }

  bool is_independent(std::uint32_t set) const {
    for (std::uint32_t rest = set; rest;) {
      const int v = std::countr_zero(rest);
      rest &= rest - 1;
      if (adj_[static_cast<std::size_t>(v)] & set) return false;
    }
    return true;
  }

  bool connected() const {
    std::uint32_t seen = 1, frontier = 1;
    while (frontier) {
      std::uint32_t next = 0;
      while (frontier) {
        const int v = std::countr_zero(frontier);
        frontier &= frontier - 1;
        next |= adj_[static_cast<std::size_t>(v)];
      }
      frontier = next & ~seen;
      seen |= next;
    }
    return seen == all_vertices_mask();
  }

 private:
  int n_;
  int edges_ = 0;
  std::vector<std::uint32_t> adj_;
};

inline Graph path_graph(int n) {
  Graph g(n);
  for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  return g;
}

inline Graph cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("cycle_graph: needs at least 3 vertices");
  Graph g = path_graph(n);
  g.add_edge(n - 1, 0);
  return g;
}

inline Graph complete_graph(int n) {
  Graph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

inline Graph empty_graph(int n) { return Graph(n); }

inline Graph complete_bipartite(int a, int b) {
  Graph g(a + b);
  for (int u = 0; u < a; ++u)
    for (int v = 0; v < b; ++v) g.add_edge(u, a + v);
  return g;
}

inline Graph grid_graph(int rows, int cols) {
  Graph g(rows * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) g.add_edge(r * cols + c, r * cols + c + 1);
      if (r + 1 < rows) g.add_edge(r * cols + c, (r + 1) * cols + c);
    }
  return g;
}

inline Graph petersen_graph() {
  Graph g(10);
  for (int v = 0; v < 5; ++v) {
    g.add_edge(v, (v + 1) % 5);      // outer cycle
    g.add_edge(5 + v, 5 + (v + 2) % 5);  // inner pentagram
    g.add_edge(v, 5 + v);            // spokes
  }
  return g;
}

/// Parses the "n m" header plus m "u v" edge lines; errors carry 1-based line
/// numbers.
inline Graph parse_graph(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw std::invalid_argument("graph: missing header line");
  std::istringstream header(line);
  int n = 0, m = 0;
  if (!(header >> n >> m))
    throw std::invalid_argument("graph: line " + std::to_string(line_no) +
                                ": expected \"n m\" header");
  Graph g(n);
  for (int e = 0; e < m; ++e) {
    if (!next_line())
      throw std::invalid_argument("graph: expected " + std::to_string(m) + " edges, got " +
                                  std::to_string(e));
    std::istringstream row(line);
    int u = 0, v = 0;
    if (!(row >> u >> v))
      throw std::invalid_argument("graph: line " + std::to_string(line_no) +
                                  ": expected \"u v\" edge");
    try {
      g.add_edge(u, v);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument("graph: line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  return g;
}

inline Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("graph: cannot open " + path);
  return parse_graph(in);
}

}  // namespace sparseloc
