#include "allconcur/digraph.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace allconcur {

Digraph Digraph::singleton(int n, NodeId v) {
  Digraph g(n);
  g.add_node(v);
  return g;
}

Digraph Digraph::from_edges(int n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Digraph g(n);
  g.nodes_ = full_mask(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

int Digraph::edge_count() const {
  int c = 0;
  for (NodeMask row : adj_) c += popcount(row);
  return c;
}

std::vector<std::pair<NodeId, NodeId>> Digraph::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId u = 0; u < n_; ++u)
    for (NodeId v : mask_to_ids(adj_[u])) out.emplace_back(u, v);
  return out;
}

void Digraph::add_node(NodeId v) {
  if (v >= n_) throw std::invalid_argument("node out of range");
  nodes_ |= bit(v);
}

void Digraph::add_edge(NodeId u, NodeId v) {
  if (!contains(u) || !contains(v)) throw std::invalid_argument("edge endpoint not a node");
  if (u == v) throw std::invalid_argument("self-loop");
  adj_[u] |= bit(v);
}

void Digraph::remove_edge(NodeId u, NodeId v) {
  if (u < n_) adj_[u] &= ~bit(v);
}

void Digraph::restrict_nodes(NodeMask keep) {
  nodes_ &= keep;
  for (NodeId u = 0; u < n_; ++u) {
    if (!contains(u))
      adj_[u] = 0;
    else
      adj_[u] &= nodes_;
  }
}

void Digraph::clear() {
  nodes_ = 0;
  std::fill(adj_.begin(), adj_.end(), NodeMask{0});
}

NodeMask Digraph::reachable(NodeId src) const {
  if (!contains(src)) return 0;
  NodeMask seen = bit(src);
  NodeMask frontier = seen;
  while (frontier) {
    NodeMask next = 0;
    for (NodeId u : mask_to_ids(frontier)) next |= adj_[u];
    frontier = next & ~seen;
    seen |= frontier;
  }
  return seen;
}

NodeMask successors(const Digraph& g, NodeId p) {
  if (!g.contains(p)) throw std::invalid_argument("successors: unknown node");
  return g.out(p);
}

Digraph make_circulant(int n, const std::vector<int>& offsets) {
  if (n < 1 || n > kMaxNodes) throw std::invalid_argument("circulant: bad n");
  if (offsets.empty()) throw std::invalid_argument("circulant: no offsets");
  Digraph g(n);
  for (NodeId i = 0; i < n; ++i) g.add_node(i);
  for (int s : offsets) {
    if (s < 1 || s >= n) throw std::invalid_argument("circulant: offset out of [1,n)");
    for (int i = 0; i < n; ++i)
      g.add_edge(static_cast<NodeId>(i), static_cast<NodeId>((i + s) % n));
  }
  return g;
}

Digraph make_complete(int n) {
  std::vector<int> offsets(static_cast<size_t>(n - 1));
  for (int s = 1; s < n; ++s) offsets[static_cast<size_t>(s - 1)] = s;
  return make_circulant(n, offsets);
}

bool has_path(const Digraph& g, NodeId u, NodeId v) {
  if (!g.contains(u) || !g.contains(v)) throw std::invalid_argument("has_path: unknown node");
  return has(g.reachable(u), v);
}

namespace {

// BFS distances from src over member nodes; -1 for unreachable.
std::vector<int> bfs_dist(const Digraph& g, NodeId src) {
  std::vector<int> dist(static_cast<size_t>(g.universe()), -1);
  dist[src] = 0;
  NodeMask seen = bit(src);
  NodeMask frontier = seen;
  int d = 0;
  while (frontier) {
    ++d;
    NodeMask next = 0;
    for (NodeId u : mask_to_ids(frontier)) next |= g.out(u);
    frontier = next & ~seen;
    seen |= frontier;
    for (NodeId v : mask_to_ids(frontier)) dist[v] = d;
  }
  return dist;
}

// Max-flow value from s to t on a small unit-ish capacity matrix (Edmonds-Karp).
int max_flow(std::vector<std::vector<int>>& cap, int s, int t) {
  const int n = static_cast<int>(cap.size());
  int flow = 0;
  std::vector<int> parent(static_cast<size_t>(n));
  for (;;) {
    std::fill(parent.begin(), parent.end(), -1);
    parent[s] = s;
    std::vector<int> queue{s};
    for (size_t qi = 0; qi < queue.size() && parent[t] < 0; ++qi) {
      int u = queue[qi];
      for (int v = 0; v < n; ++v)
        if (parent[v] < 0 && cap[u][v] > 0) {
          parent[v] = u;
          queue.push_back(v);
        }
    }
    if (parent[t] < 0) return flow;
    for (int v = t; v != s; v = parent[v]) {
      cap[parent[v]][v] -= 1;
      cap[v][parent[v]] += 1;
    }
    ++flow;
  }
}

}  // namespace

int diameter(const Digraph& g) {
  int best = 0;
  for (NodeId u : mask_to_ids(g.nodes())) {
    auto dist = bfs_dist(g, u);
    for (NodeId v : mask_to_ids(g.nodes())) {
      if (v == u) continue;
      if (dist[v] < 0) return -1;
      best = std::max(best, dist[v]);
    }
  }
  return best;
}

int vertex_connectivity(const Digraph& g) {
  auto ids = mask_to_ids(g.nodes());
  const int n = g.universe();
  if (ids.size() < 2) throw std::invalid_argument("vertex_connectivity: need >= 2 nodes");
  // Node splitting: u_in = 2u, u_out = 2u+1; u_in->u_out cap 1; (u,v) edge
  // becomes u_out->v_in cap 1. kappa = min over ordered pairs of
  // max_flow(u_out, v_in); the direct edge contributes one path.
  int best = -1;
  for (NodeId u : ids)
    for (NodeId v : ids) {
      if (u == v) continue;
      std::vector<std::vector<int>> cap(static_cast<size_t>(2 * n),
                                        std::vector<int>(static_cast<size_t>(2 * n), 0));
      for (NodeId w : ids) cap[2 * w][2 * w + 1] = 1;
      for (NodeId a : ids)
        for (NodeId b : mask_to_ids(g.out(a))) cap[2 * a + 1][2 * b] = 1;
      int f = max_flow(cap, 2 * u + 1, 2 * v);
      if (best < 0 || f < best) best = f;
      if (best == 0) return 0;
    }
  return best;
}

int fault_diameter(const Digraph& g, int f) {
  if (f < 0) throw std::invalid_argument("fault_diameter: negative f");
  if (f > 0 && vertex_connectivity(g) <= f)
    throw std::invalid_argument("fault_diameter: connectivity <= f");
  auto ids = mask_to_ids(g.nodes());
  if (f >= static_cast<int>(ids.size())) throw std::invalid_argument("fault_diameter: f too large");

  int best = 0;
  // Enumerate all subsets R of size f via combination indices.
  std::vector<size_t> pick(static_cast<size_t>(f));
  for (size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  for (;;) {
    NodeMask removed = 0;
    for (size_t i : pick) removed |= bit(ids[i]);
    Digraph h = g;
    h.restrict_nodes(~removed);
    int d = diameter(h);
    if (d < 0) throw std::runtime_error("fault_diameter: removal disconnects graph");
    best = std::max(best, d);
    if (f == 0) break;
    // next combination
    int i = f - 1;
    while (i >= 0 && pick[static_cast<size_t>(i)] == ids.size() - static_cast<size_t>(f - i))
      --i;
    if (i < 0) break;
    ++pick[static_cast<size_t>(i)];
    for (size_t j = static_cast<size_t>(i) + 1; j < pick.size(); ++j)
      pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace allconcur
