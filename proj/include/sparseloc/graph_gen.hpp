#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "sparseloc/graph.hpp"
#include "sparseloc/rng.hpp"

namespace sparseloc {

/// Every connected labeled graph on exactly n vertices (n <= 6), by scanning
/// all edge subsets.
inline std::vector<Graph> all_connected_graphs_labeled(int n) {
  if (n < 1 || n > 6)
    throw std::invalid_argument("all_connected_graphs_labeled: n must be in [1, 6]");
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  std::vector<Graph> out;
  for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
    Graph g(n);
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if ((mask >> e) & 1u) g.add_edge(pairs[e].first, pairs[e].second);
    if (g.connected()) out.push_back(std::move(g));
  }
  return out;
}

namespace detail {

/// Lexicographically smallest adjacency code over all vertex orderings.
/// The code packs, for each placement position p >= 1, the p adjacency bits
/// to the previously placed vertices (earlier positions more significant).
/// Branch-and-bound over partial orderings keeps this fast for n <= 8.
inline std::uint64_t canonical_code(const Graph& g) {
  const int n = g.n();
  if (n > 11) throw std::invalid_argument("canonical_code: graph too large");
  const int total_bits = n * (n - 1) / 2;
  std::uint64_t best = ~std::uint64_t{0};
  std::vector<int> perm(static_cast<std::size_t>(n));

  auto rec = [&](auto&& self, int depth, std::uint32_t used, std::uint64_t prefix) -> void {
    if (depth == n) {
      if (prefix < best) best = prefix;
      return;
    }
    const int prefix_bits = depth * (depth - 1) / 2;
    for (int v = 0; v < n; ++v) {
      if ((used >> v) & 1u) continue;
      std::uint64_t word = 0;
      for (int q = 0; q < depth; ++q)
        word = (word << 1) | (g.has_edge(perm[static_cast<std::size_t>(q)], v) ? 1u : 0u);
      const std::uint64_t next_prefix = (prefix << depth) | word;
      const int remaining = total_bits - (prefix_bits + depth);
      if (best != ~std::uint64_t{0} && next_prefix > (best >> remaining)) continue;
      perm[static_cast<std::size_t>(depth)] = v;
      self(self, depth + 1, used | (1u << v), next_prefix);
    }
  };
  rec(rec, 0, 0, 0);
  return best;
}

}  // namespace detail

/// One representative per isomorphism class of connected graphs on exactly n
/// vertices with maximum degree <= max_deg. Built by repeatedly attaching a
/// new vertex to a nonempty subset of an (n-1)-vertex representative, then
/// deduplicating by canonical code; every connected graph arises this way
/// through a search-order vertex sequence.
inline std::vector<Graph> connected_graphs_up_to_iso(int n, int max_deg) {
  if (n < 1 || n > 8) throw std::invalid_argument("connected_graphs_up_to_iso: n must be in [1, 8]");
  if (max_deg < 1) throw std::invalid_argument("connected_graphs_up_to_iso: max_deg must be >= 1");
  std::vector<Graph> level;
  level.push_back(Graph(1));
  for (int size = 2; size <= n; ++size) {
    std::vector<Graph> next;
    std::set<std::uint64_t> seen;
    const int prev = size - 1;
    for (const Graph& g : level) {
      for (std::uint32_t attach = 1; attach < (1u << prev); ++attach) {
        if (std::popcount(attach) > max_deg) continue;
        bool degree_ok = true;
        for (std::uint32_t rest = attach; rest && degree_ok;) {
          const int a = std::countr_zero(rest);
          rest &= rest - 1;
          degree_ok = g.degree(a) < max_deg;
        }
        if (!degree_ok) continue;
        Graph h(size);
        for (int u = 0; u < prev; ++u)
          for (int v = u + 1; v < prev; ++v)
            if (g.has_edge(u, v)) h.add_edge(u, v);
        for (std::uint32_t rest = attach; rest;) {
          const int a = std::countr_zero(rest);
          rest &= rest - 1;
          h.add_edge(a, prev);
        }
        if (seen.insert(detail::canonical_code(h)).second) next.push_back(std::move(h));
      }
    }
    level = std::move(next);
  }
  return level;
}

/// Representatives for all sizes 1..n_max at once.
inline std::vector<Graph> connected_graphs_up_to_iso_all_sizes(int n_max, int max_deg) {
  std::vector<Graph> out;
  for (int n = 1; n <= n_max; ++n)
    for (auto& g : connected_graphs_up_to_iso(n, max_deg)) out.push_back(std::move(g));
  return out;
}

/// Random spanning tree (each vertex wired to a uniform earlier one) plus up
/// to extra_edges additional random non-edges.
inline Graph random_connected_graph(int n, int extra_edges, Rng& rng) {
  Graph g(n);
  for (int v = 1; v < n; ++v)
    g.add_edge(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(v))), v);
  for (int attempt = 0; attempt < 4 * extra_edges && extra_edges > 0; ++attempt) {
    const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (u == v || g.has_edge(u, v)) continue;
    g.add_edge(u, v);
    --extra_edges;
  }
  return g;
}

}  // namespace sparseloc
