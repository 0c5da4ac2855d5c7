#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "allconcur/types.hpp"

namespace allconcur {

// Directed graph over a fixed universe 0..n-1 with a membership mask and
// per-node adjacency masks. Serves both as the static overlay and as the
// mutable tracking digraphs, so removal keeps rows/columns of non-members
// zeroed (canonical form: equal graphs have equal bytes).
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(int n) : n_(n), adj_(static_cast<size_t>(n), 0) {}

  static Digraph singleton(int n, NodeId v);
  static Digraph from_edges(int n, const std::vector<std::pair<NodeId, NodeId>>& edges);

  int universe() const { return n_; }
  NodeMask nodes() const { return nodes_; }
  int node_count() const { return popcount(nodes_); }
  bool empty() const { return nodes_ == 0; }
  bool contains(NodeId v) const { return has(nodes_, v); }
  bool has_edge(NodeId u, NodeId v) const { return contains(u) && has(adj_[u], v); }
  NodeMask out(NodeId v) const { return adj_[v]; }
  int edge_count() const;
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  void add_node(NodeId v);
  void add_edge(NodeId u, NodeId v);  // endpoints must be members
  void remove_edge(NodeId u, NodeId v);
  void restrict_nodes(NodeMask keep);  // drop members outside keep, with incident edges
  void clear();

  // Mask of nodes reachable from src by directed paths (src included if member).
  NodeMask reachable(NodeId src) const;

  bool operator==(const Digraph&) const = default;

 private:
  int n_ = 0;
  NodeMask nodes_ = 0;
  std::vector<NodeMask> adj_;
};

// p's successors p+(G). p must be a member.
NodeMask successors(const Digraph& g, NodeId p);

// Nodes 0..n-1 with edges (i, (i+s) mod n) for each offset s.
Digraph make_circulant(int n, const std::vector<int>& offsets);

Digraph make_complete(int n);

// true iff a directed path u -> ... -> v exists; has_path(g,u,u) is true.
bool has_path(const Digraph& g, NodeId u, NodeId v);

// Length of the longest shortest path over ordered member pairs; -1 if some
// pair is unreachable.
int diameter(const Digraph& g);

// Minimum over ordered pairs (u,v) of the maximum number of internally
// node-disjoint u->v paths, via unit-capacity node-split max-flow.
int vertex_connectivity(const Digraph& g);

// Max diameter of g minus R over all node subsets R with |R| = f.
// Requires vertex_connectivity(g) > f.
int fault_diameter(const Digraph& g, int f);

}  // namespace allconcur
