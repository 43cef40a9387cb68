#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <sstream>

#include "sparseloc/graph.hpp"
#include "sparseloc/graph_gen.hpp"
#include "sparseloc/rng.hpp"

using namespace sparseloc;

TEST_CASE("builders produce the expected edge counts and degrees") {
  REQUIRE(path_graph(5).num_edges() == 4);
  REQUIRE(cycle_graph(6).num_edges() == 6);
  REQUIRE(complete_graph(5).num_edges() == 10);
  REQUIRE(complete_bipartite(3, 3).num_edges() == 9);
  REQUIRE(grid_graph(2, 3).num_edges() == 7);
  REQUIRE(empty_graph(4).num_edges() == 0);
  const auto pete = petersen_graph();
  REQUIRE(pete.n() == 10);
  REQUIRE(pete.num_edges() == 15);
  REQUIRE(pete.max_degree() == 3);
  REQUIRE(pete.connected());
}

TEST_CASE("adjacency queries are symmetric") {
  const auto g = cycle_graph(5);
  for (int u = 0; u < 5; ++u)
    for (int v = 0; v < 5; ++v) REQUIRE(g.has_edge(u, v) == g.has_edge(v, u));
  REQUIRE(g.degree(0) == 2);
  REQUIRE(g.neighbor_list(0) == std::vector<int>{1, 4});
}

TEST_CASE("edge insertion rejects self-loops and duplicates") {
  Graph g(3);
  g.add_edge(0, 1);
  REQUIRE_THROWS_AS(g.add_edge(0, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(g.add_edge(1, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(g.add_edge(0, 3), std::invalid_argument);
}

TEST_CASE("graph files parse with line-numbered diagnostics") {
  std::istringstream good("3 2\n0 1\n1 2\n");
  const auto g = parse_graph(good);
  REQUIRE(g.n() == 3);
  REQUIRE(g.num_edges() == 2);

  std::istringstream self_loop("2 1\n1 1\n");
  try {
    parse_graph(self_loop);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
  }

  std::istringstream dup("2 2\n0 1\n0 1\n");
  REQUIRE_THROWS_AS(parse_graph(dup), std::invalid_argument);
  std::istringstream short_file("2 2\n0 1\n");
  REQUIRE_THROWS_AS(parse_graph(short_file), std::invalid_argument);
}

TEST_CASE("neighborhood masks cover exactly the adjacent vertices") {
  const auto g = path_graph(4);
  REQUIRE(g.neighbors(1) == 0b0101u);
  REQUIRE(g.neighborhood(0b0010u) == 0b0101u);
  REQUIRE(g.is_independent(0b1001u));
  REQUIRE_FALSE(g.is_independent(0b0011u));
}

TEST_CASE("labeled enumeration matches the classical connected counts") {
  REQUIRE(all_connected_graphs_labeled(1).size() == 1);
  REQUIRE(all_connected_graphs_labeled(2).size() == 1);
  REQUIRE(all_connected_graphs_labeled(3).size() == 4);
  REQUIRE(all_connected_graphs_labeled(4).size() == 38);
  REQUIRE(all_connected_graphs_labeled(5).size() == 728);
}

TEST_CASE("canonical codes identify isomorphic relabelings") {
  Graph a(4);
  a.add_edge(0, 1);
  a.add_edge(1, 2);
  a.add_edge(2, 3);
  Graph b(4);  // the same path under the relabeling 2,0,3,1
  b.add_edge(2, 0);
  b.add_edge(0, 3);
  b.add_edge(3, 1);
  REQUIRE(detail::canonical_code(a) == detail::canonical_code(b));
  Graph c(4);
  c.add_edge(0, 1);
  c.add_edge(1, 2);
  c.add_edge(2, 0);
  c.add_edge(2, 3);
  REQUIRE(detail::canonical_code(a) != detail::canonical_code(c));
}

TEST_CASE("representative generator agrees with labeled enumeration classes") {
  for (int n = 1; n <= 5; ++n) {
    std::set<std::uint64_t> classes;
    for (const auto& g : all_connected_graphs_labeled(n)) classes.insert(detail::canonical_code(g));
    REQUIRE(connected_graphs_up_to_iso(n, n).size() == classes.size());

    std::set<std::uint64_t> capped_classes;
    for (const auto& g : all_connected_graphs_labeled(n))
      if (g.max_degree() <= 3) capped_classes.insert(detail::canonical_code(g));
    REQUIRE(connected_graphs_up_to_iso(n, 3).size() == capped_classes.size());
  }
}

TEST_CASE("unlabeled connected counts match the classical sequence") {
  REQUIRE(connected_graphs_up_to_iso(4, 4).size() == 6);
  REQUIRE(connected_graphs_up_to_iso(5, 5).size() == 21);
  REQUIRE(connected_graphs_up_to_iso(6, 6).size() == 112);
}

TEST_CASE("random graphs come out connected with the requested order") {
  Rng rng(79);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_connected_graph(6, 3, rng);
    REQUIRE(g.n() == 6);
    REQUIRE(g.connected());
    REQUIRE(g.num_edges() >= 5);
  }
}
