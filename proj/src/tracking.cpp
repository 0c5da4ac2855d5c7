#include "allconcur/tracking.hpp"

#include <cassert>
#include <deque>
#include <utility>

namespace allconcur {

namespace {

bool all_failed_known(const Digraph& td, const FailureView& view) {
  NodeMask m = td.nodes();
  while (m) {
    NodeId v = lowest(m);
    m &= m - 1;
    if (view[v] == 0) return false;
  }
  return true;
}

void complete_prune(Digraph& td, const FailureView& view) {
  if (!td.empty() && all_failed_known(td, view)) td.clear();
}

}  // namespace

Digraph td_init(int n, NodeId p_star) { return Digraph::singleton(n, p_star); }

void td_update_recursive(Digraph& td, NodeId p_star, NodeId o, NodeId t,
                         const FailureView& view, const Digraph& g, bool has_msg,
                         bool include_notifier) {
  if (has_msg) {
    td.clear();
    return;
  }
  assert(td.contains(t));
  assert(has(view[t], o));

  if (td.out(t) != 0) {
    // Repeat notification: o cannot have received the message from t, so the
    // suspected transmission (t,o) goes away, along with anything only
    // reachable through it.
    td.remove_edge(t, o);
    td.restrict_nodes(td.reachable(p_star));
  } else {
    // First notification of t: expand along t's other successors.
    std::deque<std::pair<NodeId, NodeId>> queue;
    NodeMask seed = successors(g, t);
    if (!include_notifier) seed &= ~bit(o);
    for (NodeMask m = seed; m; m &= m - 1) queue.emplace_back(t, lowest(m));
    while (!queue.empty()) {
      auto [x, y] = queue.front();
      queue.pop_front();
      if (!td.contains(y)) {
        td.add_node(y);
        td.add_edge(x, y);
        if (view[y] != 0) {
          NodeMask next = successors(g, y) & ~view[y];
          for (NodeMask m = next; m; m &= m - 1) queue.emplace_back(y, lowest(m));
        }
      } else {
        td.add_edge(x, y);
      }
    }
  }
  complete_prune(td, view);
}

Digraph td_build(NodeId p_star, const FailureView& view, const Digraph& g) {
  const int n = g.universe();
  Digraph td(n);
  td.add_node(p_star);
  // Depth-first over edges leaving failed-known servers; every interior node
  // of such a path is failed-known by construction, which is exactly the
  // connected-through-failures membership rule.
  std::vector<NodeId> stack{p_star};
  NodeMask seen = bit(p_star);
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    if (view[x] == 0) continue;
    NodeMask next = successors(g, x) & ~view[x];
    for (NodeMask m = next; m; m &= m - 1) {
      NodeId y = lowest(m);
      if (!has(seen, y)) {
        seen |= bit(y);
        td.add_node(y);
        stack.push_back(y);
      }
    }
  }
  // Edges between kept nodes, restricted to the same rule.
  for (NodeMask m = td.nodes(); m; m &= m - 1) {
    NodeId x = lowest(m);
    if (view[x] == 0) continue;
    NodeMask next = successors(g, x) & ~view[x] & td.nodes();
    for (NodeMask e = next; e; e &= e - 1) td.add_edge(x, lowest(e));
  }
  complete_prune(td, view);
  return td;
}

std::vector<std::string> check_td_invariants(const Digraph& td, NodeId p_star,
                                             const FailureView& view, const Digraph& g) {
  std::vector<std::string> out;
  if (!td.contains(p_star)) out.push_back("I1: root " + std::to_string(p_star) + " missing");
  for (NodeMask m = td.nodes(); m; m &= m - 1) {
    NodeId q = lowest(m);
    if (view[q] != 0) {
      NodeMask want = successors(g, q) & ~view[q];
      if ((want & ~td.nodes()) != 0)
        out.push_back("I2: live successors of failed-known " + std::to_string(q) +
                      " not all suspected");
    }
  }
  for (auto [e1, e2] : td.edge_list()) {
    bool ok = view[e1] != 0 && has(successors(g, e1) & ~view[e1], e2);
    if (!ok)
      out.push_back("I3: edge (" + std::to_string(e1) + "," + std::to_string(e2) +
                    ") not justified by failure knowledge");
  }
  for (NodeMask m = td.nodes(); m; m &= m - 1) {
    NodeId q = lowest(m);
    if (q == p_star) continue;
    bool justified = false;
    for (NodeMask pm = td.nodes(); pm && !justified; pm &= pm - 1) {
      NodeId qp = lowest(pm);
      if (view[qp] != 0 && has(successors(g, qp) & ~view[qp], q)) justified = true;
    }
    if (!justified)
      out.push_back("I4: node " + std::to_string(q) + " neither root nor a failed-known's successor");
  }
  return out;
}

Digraph rtd_build(NodeId p_star, const FailureView& view, bool m_has, const Digraph& g) {
  const int n = g.universe();
  Digraph rtd(n);
  rtd.add_node(p_star);
  std::vector<NodeId> stack{p_star};
  NodeMask seen = bit(p_star);
  while (!stack.empty()) {
    NodeId t = stack.back();
    stack.pop_back();
    if (view[t] == 0) continue;
    NodeMask next = successors(g, t);  // notifier included: growth never undone
    for (NodeMask m = next; m; m &= m - 1) {
      NodeId y = lowest(m);
      if (!has(seen, y)) {
        seen |= bit(y);
        rtd.add_node(y);
        stack.push_back(y);
      }
    }
  }
  for (NodeMask m = rtd.nodes(); m; m &= m - 1) {
    NodeId e1 = lowest(m);
    if (view[e1] == 0) continue;
    NodeMask next = successors(g, e1) & rtd.nodes();
    for (NodeMask e = next; e; e &= e - 1) {
      NodeId e2 = lowest(e);
      // e2 reported e1's failure without the message having arrived: the
      // message cannot have traveled e1->e2 (it would have arrived first).
      if (has(view[e1], e2) && !m_has) continue;
      rtd.add_edge(e1, e2);
    }
  }
  return rtd;
}

bool check_rtd_invariant(const Digraph& td, NodeId p_star, const FailureView& view,
                         bool m_has, const Digraph& g) {
  Digraph rtd = rtd_build(p_star, view, m_has, g);
  NodeMask reach = rtd.reachable(p_star);
  for (NodeMask m = rtd.nodes() & ~td.nodes(); m; m &= m - 1) {
    NodeId q = lowest(m);
    bool ok = m_has || view[q] != 0 || !has(reach, q);
    if (!ok) return false;
  }
  return true;
}

}  // namespace allconcur
