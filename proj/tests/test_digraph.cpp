#include <doctest.h>

#include <stdexcept>

#include "allconcur/digraph.hpp"
#include "oracles.hpp"

using namespace allconcur;
using test_oracles::brute_connectivity;
using test_oracles::fig3_graph;
using test_oracles::random_digraph;

TEST_CASE("digraph basics") {
  Digraph g(4);
  CHECK(g.empty());
  g.add_node(0);
  g.add_node(2);
  g.add_edge(0, 2);
  CHECK(g.contains(0));
  CHECK_FALSE(g.contains(1));
  CHECK(g.has_edge(0, 2));
  CHECK(g.edge_count() == 1);
  CHECK_THROWS_AS(g.add_edge(0, 1), std::invalid_argument);  // 1 not a member
  CHECK_THROWS_AS(g.add_edge(0, 0), std::invalid_argument);  // self loop
  g.remove_edge(0, 2);
  CHECK(g.edge_count() == 0);

  Digraph s = Digraph::singleton(3, 2);
  CHECK(s.nodes() == bit(2));
  CHECK(s.edge_count() == 0);
}

TEST_CASE("restrict keeps canonical form") {
  Digraph g = make_complete(3);
  Digraph h = make_complete(3);
  h.restrict_nodes(bit(0) | bit(1));
  g.restrict_nodes(bit(0) | bit(1));
  CHECK(g == h);
  CHECK(g.nodes() == (bit(0) | bit(1)));
  CHECK(g.edge_count() == 2);
  // a rebuilt graph with the same members/edges compares equal;
  // from_edges marks all n ids as members, so trim to match
  Digraph direct = Digraph::from_edges(3, {{0, 1}, {1, 0}});
  direct.restrict_nodes(bit(0) | bit(1));
  CHECK(g == direct);
}

TEST_CASE("successors") {
  CHECK(successors(make_complete(3), 0) == (bit(1) | bit(2)));
  CHECK(successors(make_circulant(4, {1, 2}), 0) == (bit(1) | bit(2)));
  CHECK(successors(Digraph::singleton(1, 0), 0) == 0);
  Digraph g(3);
  g.add_node(0);
  CHECK_THROWS_AS(successors(g, 1), std::invalid_argument);
}

TEST_CASE("make_circulant") {
  Digraph c4 = make_circulant(4, {1, 2});
  CHECK(c4.edge_count() == 8);
  for (NodeId v = 0; v < 4; ++v) CHECK(popcount(c4.out(v)) == 2);

  Digraph c9 = make_circulant(9, {1, 2, 4});
  CHECK(c9.edge_count() == 27);
  for (NodeId v = 0; v < 9; ++v) {
    CHECK(popcount(c9.out(v)) == 3);
    int in = 0;
    for (NodeId u = 0; u < 9; ++u) in += c9.has_edge(u, v) ? 1 : 0;
    CHECK(in == 3);
  }
  CHECK(vertex_connectivity(c9) == 3);

  CHECK(make_circulant(3, {1, 2}) == make_complete(3));
  CHECK_THROWS_AS(make_circulant(4, {0}), std::invalid_argument);
  CHECK_THROWS_AS(make_circulant(4, {4}), std::invalid_argument);
}

TEST_CASE("has_path") {
  Digraph ring = make_circulant(3, {1});
  CHECK(has_path(ring, 0, 2));
  CHECK(has_path(ring, 0, 0));
  Digraph bare(2);
  bare.add_node(0);
  bare.add_node(1);
  CHECK_FALSE(has_path(bare, 0, 1));
  CHECK(has_path(bare, 1, 1));
  Digraph partial(3);
  partial.add_node(0);
  CHECK_THROWS_AS(has_path(partial, 0, 1), std::invalid_argument);
}

TEST_CASE("diameter") {
  CHECK(diameter(make_complete(4)) == 1);
  CHECK(diameter(make_circulant(5, {1})) == 4);
  CHECK(diameter(make_circulant(9, {1, 2, 4})) == 3);
  CHECK(diameter(fig3_graph()) == 3);
  Digraph bare(2);
  bare.add_node(0);
  bare.add_node(1);
  CHECK(diameter(bare) == -1);
}

TEST_CASE("vertex_connectivity on known graphs") {
  CHECK(vertex_connectivity(make_complete(3)) == 2);
  CHECK(vertex_connectivity(make_complete(5)) == 4);
  CHECK(vertex_connectivity(make_circulant(5, {1})) == 1);
  CHECK(vertex_connectivity(make_circulant(4, {1, 2})) == 2);
  CHECK(vertex_connectivity(fig3_graph()) == 3);
  CHECK_THROWS_AS(vertex_connectivity(Digraph::singleton(1, 0)), std::invalid_argument);
  // disconnected -> 0
  Digraph bare(3);
  for (NodeId v = 0; v < 3; ++v) bare.add_node(v);
  CHECK(vertex_connectivity(bare) == 0);
}

TEST_CASE("vertex_connectivity matches cut enumeration") {
  Rng rng(2024);
  int checked = 0;
  for (int i = 0; i < 30; ++i) {
    int n = 2 + static_cast<int>(rng.below(6));  // 2..7
    double p = 0.15 + 0.2 * static_cast<double>(rng.below(4));
    Digraph g = random_digraph(n, p, rng);
    CHECK(vertex_connectivity(g) == brute_connectivity(g));
    ++checked;
  }
  CHECK(checked == 30);
}

TEST_CASE("fault_diameter") {
  CHECK(fault_diameter(make_complete(4), 1) == 1);
  CHECK(fault_diameter(make_circulant(4, {1, 2}), 1) == 2);
  Digraph c9 = make_circulant(9, {1, 2, 4});
  CHECK(fault_diameter(c9, 0) == diameter(c9));  // f=0: no removals
  CHECK(fault_diameter(c9, 1) == 3);
  CHECK(fault_diameter(c9, 2) == 4);
  CHECK(fault_diameter(fig3_graph(), 2) == 5);
  CHECK_THROWS_AS(fault_diameter(make_circulant(5, {1}), 1), std::invalid_argument);
}
