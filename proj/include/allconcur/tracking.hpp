#pragma once

#include <string>
#include <vector>

#include "allconcur/digraph.hpp"
#include "allconcur/types.hpp"

namespace allconcur {

// One server's failure knowledge: view[t] = set of servers whose notification
// of t's failure has been processed (the o field of FAIL messages, i.e. the
// original detector, preserved through forwarding).
using FailureView = std::vector<NodeMask>;

// Fresh tracking digraph: the owner is the only suspect.
Digraph td_init(int n, NodeId p_star);

// Incremental update of td after processing a notification (o = detector,
// t = failed target). Caller guarantees t is a td node, view already includes
// o, and has_msg reflects whether the tracked message itself has arrived.
//
// First notification of t grows the digraph along t's other successors
// (worklist over edges, newly added failed-known nodes expand recursively);
// a repeat notification instead removes the edge (t,o) and prunes everything
// no longer reachable from the root. Either way, if every remaining suspect
// is known failed the whole digraph is discarded.
//
// include_notifier keeps o among t's successors during expansion (a protocol
// mutation used to validate the checker; the correct protocol excludes it).
void td_update_recursive(Digraph& td, NodeId p_star, NodeId o, NodeId t,
                         const FailureView& view, const Digraph& g, bool has_msg,
                         bool include_notifier = false);

// From-scratch construction: keep exactly the servers connected to the root
// through failures, i.e. reachable from p_star in the digraph whose edges are
// (e1,e2) with view[e1] nonempty and e2 a successor of e1 not in view[e1].
// Same complete-pruning post-pass as the incremental form.
Digraph td_build(NodeId p_star, const FailureView& view, const Digraph& g);

// Structural invariants of a non-empty tracking digraph; returns one message
// per violated clause (empty = all hold).
std::vector<std::string> check_td_invariants(const Digraph& td, NodeId p_star,
                                             const FailureView& view, const Digraph& g);

// Grow-only reconstruction from failure notifications alone: every successor
// of a failed-known node stays a suspect forever (including the notifier);
// edges (e1,e2) are dropped only when e2 reported e1's failure and the tracked
// message has not arrived (it then cannot have traveled e1->e2).
Digraph rtd_build(NodeId p_star, const FailureView& view, bool m_has, const Digraph& g);

// For every reconstructed suspect q missing from the live digraph, one of:
// the message arrived, q is known failed, or the reconstruction has no
// root->q path left.
bool check_rtd_invariant(const Digraph& td, NodeId p_star, const FailureView& view,
                         bool m_has, const Digraph& g);

}  // namespace allconcur
