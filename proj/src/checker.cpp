#include "allconcur/checker.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <deque>
#include <stdexcept>

#include <json.hpp>

#include "allconcur/rng.hpp"
#include "allconcur/tracking.hpp"

namespace allconcur {

using nlohmann::json;

namespace {

enum CheckId : int {
  kAccuracy,
  kIntegrity,
  kSetAgreement,
  kSetAgreementStrong,
  kTdInvariants,
  kTdEquivalence,
  kRtdSuperset,
  kRtdInvariant,
  kDoneStability,
  kRemovalTrichotomy,
  kRtdMonotonicity,
  kQuiescentTermination,
  kPathWitness,
  kHolderTracked,
  kLinkFifo,
  kFdOrdering,
  kAssertion,
  kCheckCount,
};

constexpr const char* kCheckNames[kCheckCount] = {
    "accuracy",
    "integrity",
    "set_agreement",
    "set_agreement_strong",
    "td_invariants",
    "td_equivalence",
    "rtd_superset",
    "rtd_invariant",
    "done_stability",
    "removal_trichotomy",
    "rtd_monotonicity",
    "quiescent_termination",
    "path_witness",
    "holder_tracked",
    "link_fifo",
    "fd_ordering",
    "assertion",
};

constexpr uint32_t cbit(CheckId id) { return uint32_t{1} << id; }

uint32_t parse_checks(const std::vector<std::string>& names) {
  uint32_t mask = 0;
  for (const std::string& name : names) {
    bool found = false;
    for (int i = 0; i < kCheckCount; ++i)
      if (name == kCheckNames[i]) {
        mask |= cbit(static_cast<CheckId>(i));
        found = true;
        break;
      }
    if (!found) throw std::runtime_error("scenario: unknown check '" + name + "'");
  }
  return mask;
}

using Stats = std::array<PropertyStat, kCheckCount>;

// First violated property, if any.
struct Hit {
  CheckId id;
  std::string detail;
};

NodeMask live_of(const SystemState& s) {
  NodeMask m = 0;
  for (size_t p = 0; p < s.servers.size(); ++p)
    if (s.servers[p].nf) m |= bit(static_cast<NodeId>(p));
  return m;
}

std::string ids_str(NodeMask m) {
  std::string out = "{";
  bool first = true;
  for (NodeId v : mask_to_ids(m)) {
    if (!first) out += ",";
    out += std::to_string(v);
    first = false;
  }
  return out + "}";
}

// ---------------------------------------------------------------- state checks

std::optional<Hit> check_state(const SystemState& s, const SystemConfig& cfg, uint32_t mask,
                               Stats& st) {
  const int n = cfg.n;
  const NodeMask live = live_of(s);

  if (mask & cbit(kAccuracy)) {
    ++st[kAccuracy].checked;
    for (NodeId p = 0; p < n; ++p) {
      if (NodeMask bad = s.fd.detected[p] & live; bad != 0)
        return Hit{kAccuracy, "server " + std::to_string(p) + " detected live " + ids_str(bad)};
      for (NodeId t = 0; t < n; ++t)
        if (has(live, t) && s.servers[p].f[t] != 0)
          return Hit{kAccuracy, "server " + std::to_string(p) +
                                    " holds failure notifications about live " + std::to_string(t)};
    }
  }

  if (mask & cbit(kIntegrity)) {
    ++st[kIntegrity].checked;
    for (NodeId p = 0; p < n; ++p) {
      if (!s.servers[p].nf) continue;
      for (NodeMask m = s.servers[p].m; m; m &= m - 1)
        if (!s.servers[lowest(m)].ab)
          return Hit{kIntegrity, "server " + std::to_string(p) + " knows message of " +
                                     std::to_string(lowest(m)) + " which was never broadcast"};
    }
  }

  if (mask & cbit(kSetAgreement)) {
    ++st[kSetAgreement].checked;
    int first = -1;
    for (NodeId p = 0; p < n; ++p) {
      if (!s.servers[p].nf || !s.servers[p].done) continue;
      if (first < 0)
        first = p;
      else if (s.servers[p].m != s.servers[first].m)
        return Hit{kSetAgreement,
                   "done servers disagree: M[" + std::to_string(first) +
                       "]=" + ids_str(s.servers[first].m) + " M[" + std::to_string(p) +
                       "]=" + ids_str(s.servers[p].m)};
    }
  }

  if (mask & cbit(kSetAgreementStrong)) {
    ++st[kSetAgreementStrong].checked;
    for (NodeId q = 0; q < n; ++q) {
      if (!s.servers[q].nf || !s.servers[q].done) continue;
      for (NodeId p = 0; p < n; ++p) {
        if (!s.servers[p].nf) continue;
        if (NodeMask extra = s.servers[p].m & ~s.servers[q].m; extra != 0)
          return Hit{kSetAgreementStrong, "live " + std::to_string(p) + " knows " +
                                              ids_str(extra) + " missing from done " +
                                              std::to_string(q)};
      }
    }
  }

  if (mask & cbit(kTdInvariants)) {
    ++st[kTdInvariants].checked;
    for (NodeId p = 0; p < n; ++p)
      for (NodeId root = 0; root < n; ++root) {
        const Digraph& td = s.servers[p].g[root];
        if (td.empty()) continue;
        auto viols = check_td_invariants(td, root, s.servers[p].f, cfg.overlay);
        if (!viols.empty())
          return Hit{kTdInvariants, "g[" + std::to_string(p) + "][" + std::to_string(root) +
                                        "]: " + viols.front()};
      }
  }

  if (mask & cbit(kTdEquivalence)) {
    ++st[kTdEquivalence].checked;
    for (NodeId p = 0; p < n; ++p) {
      bool any_f = false;
      for (NodeId t = 0; t < n && !any_f; ++t) any_f = s.servers[p].f[t] != 0;
      if (!any_f) continue;
      for (NodeId root = 0; root < n; ++root) {
        if (has(s.servers[p].m, root)) continue;
        Digraph built = td_build(root, s.servers[p].f, cfg.overlay);
        if (!(built == s.servers[p].g[root]))
          return Hit{kTdEquivalence, "g[" + std::to_string(p) + "][" + std::to_string(root) +
                                         "] nodes " + ids_str(s.servers[p].g[root].nodes()) +
                                         " != rebuilt " + ids_str(built.nodes())};
      }
    }
  }

  if (mask & cbit(kRtdSuperset)) {
    ++st[kRtdSuperset].checked;
    for (NodeId p = 0; p < n; ++p)
      for (NodeId root = 0; root < n; ++root) {
        const Digraph& td = s.servers[p].g[root];
        if (td.empty()) continue;
        Digraph rtd =
            rtd_build(root, s.servers[p].f, has(s.servers[p].m, root), cfg.overlay);
        if ((td.nodes() & ~rtd.nodes()) != 0)
          return Hit{kRtdSuperset, "g[" + std::to_string(p) + "][" + std::to_string(root) +
                                       "] has nodes outside its reconstruction"};
        for (NodeMask m = td.nodes(); m; m &= m - 1) {
          NodeId u = lowest(m);
          if ((td.out(u) & ~rtd.out(u)) != 0)
            return Hit{kRtdSuperset, "g[" + std::to_string(p) + "][" + std::to_string(root) +
                                         "] has edges outside its reconstruction"};
        }
      }
  }

  if (mask & cbit(kRtdInvariant)) {
    ++st[kRtdInvariant].checked;
    for (NodeId p = 0; p < n; ++p)
      for (NodeId root = 0; root < n; ++root)
        if (!check_rtd_invariant(s.servers[p].g[root], root, s.servers[p].f,
                                 has(s.servers[p].m, root), cfg.overlay))
          return Hit{kRtdInvariant, "unexplained missing suspect in g[" + std::to_string(p) +
                                        "][" + std::to_string(root) + "]"};
  }

  return std::nullopt;
}

// ----------------------------------------------------------- transition checks

std::optional<Hit> check_transition(const SystemState& prev, const Action& act,
                                    const TraceEvent& ev, const SystemState& next,
                                    const SystemConfig& cfg, uint32_t mask, Stats& st) {
  const int n = cfg.n;

  if (mask & cbit(kDoneStability)) {
    ++st[kDoneStability].checked;
    for (NodeId p = 0; p < n; ++p) {
      const ServerState& a = prev.servers[p];
      const ServerState& b = next.servers[p];
      if (a.done && !b.done)
        return Hit{kDoneStability, "done[" + std::to_string(p) + "] cleared"};
      if (a.ab && !b.ab) return Hit{kDoneStability, "ab[" + std::to_string(p) + "] cleared"};
      if (!a.nf && b.nf) return Hit{kDoneStability, "nf[" + std::to_string(p) + "] restored"};
      if (a.done) {
        if (a.m != b.m)
          return Hit{kDoneStability, "M[" + std::to_string(p) + "] changed after done: " +
                                         ids_str(a.m) + " -> " + ids_str(b.m)};
        if (!(a.g == b.g))
          return Hit{kDoneStability, "tracking digraphs of done " + std::to_string(p) + " changed"};
      }
    }
  }

  if (mask & cbit(kRemovalTrichotomy)) {
    ++st[kRemovalTrichotomy].checked;
    const NodeId p = act.p;
    for (NodeId root = 0; root < n; ++root) {
      const Digraph& before = prev.servers[p].g[root];
      const Digraph& after = next.servers[p].g[root];
      NodeMask removed = before.nodes() & ~after.nodes();
      if (removed == 0) continue;
      if (has(next.servers[p].m, root)) continue;  // message arrived
      // Reconstruct reachability right after the repeat-notification edge
      // removal (if this step was one); expansion never removes nodes.
      Digraph probe = before;
      if (ev.type == TraceEvent::Type::kRecvFail) probe.remove_edge(ev.msg.t, ev.msg.o);
      NodeMask reach = probe.reachable(root);
      for (NodeMask m = removed; m; m &= m - 1) {
        NodeId q = lowest(m);
        bool unreachable = !has(reach, q);
        bool complete_prune = after.empty() && next.servers[p].f[q] != 0;
        if (!unreachable && !complete_prune)
          return Hit{kRemovalTrichotomy,
                     "suspect " + std::to_string(q) + " left g[" + std::to_string(p) + "][" +
                         std::to_string(root) + "] without justification"};
      }
    }
  }

  if (mask & cbit(kRtdMonotonicity)) {
    bool relevant = ev.type == TraceEvent::Type::kAbcast ||
                    ev.type == TraceEvent::Type::kRecvBcast ||
                    ev.type == TraceEvent::Type::kRecvFail;
    if (relevant) {
      ++st[kRtdMonotonicity].checked;
      const NodeId p = act.p;
      for (NodeId root = 0; root < n; ++root) {
        Digraph before = rtd_build(root, prev.servers[p].f, has(prev.servers[p].m, root),
                                   cfg.overlay);
        Digraph after =
            rtd_build(root, next.servers[p].f, has(next.servers[p].m, root), cfg.overlay);
        if ((before.nodes() & ~after.nodes()) != 0)
          return Hit{kRtdMonotonicity, "reconstruction of g[" + std::to_string(p) + "][" +
                                           std::to_string(root) + "] lost nodes"};
        for (NodeMask m = before.nodes(); m; m &= m - 1) {
          NodeId e1 = lowest(m);
          NodeMask lost = before.out(e1) & ~after.out(e1);
          for (NodeMask e = lost; e; e &= e - 1) {
            NodeId e2 = lowest(e);
            bool excluded =
                has(next.servers[p].f[e1], e2) && !has(next.servers[p].m, root);
            if (!excluded)
              return Hit{kRtdMonotonicity,
                         "edge (" + std::to_string(e1) + "," + std::to_string(e2) +
                             ") vanished from reconstruction of g[" + std::to_string(p) + "][" +
                             std::to_string(root) + "]"};
          }
        }
      }
    }
  }

  return std::nullopt;
}

// ------------------------------------------------------------- terminal checks

std::optional<Hit> check_terminal(const SystemState& s, const SystemConfig& cfg, uint32_t mask,
                                  Stats& st) {
  if (!(mask & cbit(kQuiescentTermination))) return std::nullopt;
  ++st[kQuiescentTermination].checked;
  const int n = cfg.n;
  int first = -1;
  for (NodeId p = 0; p < n; ++p) {
    if (!s.servers[p].nf) continue;
    if (!s.servers[p].done)
      return Hit{kQuiescentTermination,
                 "quiescent but live server " + std::to_string(p) + " never delivered"};
    if (!has(s.servers[p].m, p))
      return Hit{kQuiescentTermination,
                 "live server " + std::to_string(p) + " lacks its own message"};
    if (first < 0)
      first = p;
    else if (s.servers[p].m != s.servers[first].m)
      return Hit{kQuiescentTermination, "live servers deliver different sets: M[" +
                                            std::to_string(first) + "]=" +
                                            ids_str(s.servers[first].m) + " M[" +
                                            std::to_string(p) + "]=" + ids_str(s.servers[p].m)};
  }
  return std::nullopt;
}

// ----------------------------------------------------------------- trace checks

class TraceChecker {
 public:
  TraceChecker(const SystemConfig& cfg, uint32_t mask)
      : cfg_(&cfg),
        mask_(mask),
        shadow_(static_cast<size_t>(cfg.n)),
        path_(static_cast<size_t>(cfg.n),
              std::vector<std::vector<NodeId>>(static_cast<size_t>(cfg.n))),
        last_seq_(static_cast<size_t>(cfg.n), std::vector<int64_t>(static_cast<size_t>(cfg.n), -1)),
        watermark_(static_cast<size_t>(cfg.n),
                   std::vector<int64_t>(static_cast<size_t>(cfg.n), -1)) {}

  static bool wants(uint32_t mask) {
    return mask & (cbit(kPathWitness) | cbit(kHolderTracked) | cbit(kLinkFifo) |
                   cbit(kFdOrdering));
  }

  std::optional<Hit> on_event(const TraceEvent& ev, const SystemState& after, Stats& st) {
    switch (ev.type) {
      case TraceEvent::Type::kTx:
        shadow_[ev.b].push_back({ev.msg, ev.a, seq_++});
        return std::nullopt;
      case TraceEvent::Type::kDetect: {
        int64_t hi = -1;
        for (const Entry& e : shadow_[ev.a])
          if (e.from == ev.b) hi = static_cast<int64_t>(e.seq);
        watermark_[ev.a][ev.b] = hi;
        shadow_[ev.a].push_back({Message::fail(ev.a, ev.b), ev.a, seq_++});
        return std::nullopt;
      }
      case TraceEvent::Type::kAbcast:
        if (path_[ev.a][ev.a].empty()) path_[ev.a][ev.a] = {ev.a};
        return holder_tracked(after, st);
      case TraceEvent::Type::kFail:
        return holder_tracked(after, st);
      case TraceEvent::Type::kAdeliver:
        return std::nullopt;
      case TraceEvent::Type::kRecvBcast:
      case TraceEvent::Type::kRecvFail:
      case TraceEvent::Type::kDeliver:
        return on_pop(ev, after, st);
    }
    return std::nullopt;
  }

 private:
  struct Entry {
    Message msg;
    NodeId from;
    uint64_t seq;
  };

  std::optional<Hit> on_pop(const TraceEvent& ev, const SystemState& after, Stats& st) {
    const NodeId p = ev.a;
    if (mask_ & cbit(kLinkFifo)) ++st[kLinkFifo].checked;
    if (shadow_[p].empty())
      return Hit{kLinkFifo, "server " + std::to_string(p) + " popped an untracked message"};
    Entry e = shadow_[p].front();
    shadow_[p].pop_front();

    if (mask_ & cbit(kLinkFifo)) {
      if (!(e.msg == ev.msg))
        return Hit{kLinkFifo, "server " + std::to_string(p) + " popped out of append order"};
      if (last_seq_[e.from][p] >= static_cast<int64_t>(e.seq))
        return Hit{kLinkFifo, "link (" + std::to_string(e.from) + "," + std::to_string(p) +
                                  ") reordered"};
      last_seq_[e.from][p] = static_cast<int64_t>(e.seq);
    }

    if ((mask_ & cbit(kFdOrdering)) && e.msg.kind == MsgKind::FAIL && e.msg.o == p &&
        e.from == p) {
      ++st[kFdOrdering].checked;
      const NodeId q = e.msg.t;
      for (const Entry& rest : shadow_[p])
        if (rest.from == q && static_cast<int64_t>(rest.seq) <= watermark_[p][q])
          return Hit{kFdOrdering, "server " + std::to_string(p) +
                                      " handled its own detection of " + std::to_string(q) +
                                      " before draining that link"};
    }

    if (ev.type == TraceEvent::Type::kRecvBcast) {
      const NodeId o = ev.msg.o;
      if (mask_ & cbit(kPathWitness)) {
        ++st[kPathWitness].checked;
        if (path_[e.from][o].empty())
          return Hit{kPathWitness, "message of " + std::to_string(o) + " arrived at " +
                                      std::to_string(p) + " from a server with no receipt path"};
        std::vector<NodeId> path = path_[e.from][o];
        path.push_back(p);
        if (path.front() != o)
          return Hit{kPathWitness, "receipt path does not start at the owner"};
        for (size_t i = 0; i + 1 < path.size(); ++i)
          if (!has(successors(cfg_->overlay, path[i]), path[i + 1]))
            return Hit{kPathWitness, "receipt path of message " + std::to_string(o) + " at " +
                                        std::to_string(p) + " leaves the overlay"};
        path_[p][o] = std::move(path);
      } else if (path_[p][o].empty()) {
        std::vector<NodeId> path = path_[e.from][o];
        path.push_back(p);
        path_[p][o] = std::move(path);
      }
      if (path_[p][p].empty() && after.servers[p].ab) path_[p][p] = {p};
      return holder_tracked(after, st);
    }
    if (ev.type == TraceEvent::Type::kRecvFail) return holder_tracked(after, st);
    return std::nullopt;
  }

  // Sound per-state consequence of the message-tracking argument: while q is
  // live, undone, and missing o's message, and q already knows about every
  // failure on the receipt-path prefix before its first live server a_k, then
  // q must still suspect a_k.
  std::optional<Hit> holder_tracked(const SystemState& s, Stats& st) {
    if (!(mask_ & cbit(kHolderTracked))) return std::nullopt;
    ++st[kHolderTracked].checked;
    const int n = cfg_->n;
    for (NodeId o = 0; o < n; ++o)
      for (NodeId p = 0; p < n; ++p) {
        if (!s.servers[p].nf || !has(s.servers[p].m, o)) continue;
        const std::vector<NodeId>& path = path_[p][o];
        if (path.empty()) continue;
        size_t k = 0;
        while (k < path.size() && !s.servers[path[k]].nf) ++k;
        if (k == path.size()) continue;  // cannot happen while p itself is live
        const NodeId ak = path[k];
        for (NodeId q = 0; q < n; ++q) {
          if (!s.servers[q].nf || s.servers[q].done || has(s.servers[q].m, o)) continue;
          bool prefix_known = true;
          for (size_t i = 0; i < k && prefix_known; ++i)
            prefix_known = s.servers[q].f[path[i]] != 0;
          if (!prefix_known) continue;
          const Digraph& td = s.servers[q].g[o];
          if (td.empty() || !td.contains(ak))
            return Hit{kHolderTracked,
                       "server " + std::to_string(q) + " no longer suspects " +
                           std::to_string(ak) + " of holding message " + std::to_string(o) +
                           " although " + std::to_string(p) + " holds it"};
        }
      }
    return std::nullopt;
  }

  const SystemConfig* cfg_;
  uint32_t mask_;
  std::vector<std::deque<Entry>> shadow_;
  std::vector<std::vector<std::vector<NodeId>>> path_;
  std::vector<std::vector<int64_t>> last_seq_;
  std::vector<std::vector<int64_t>> watermark_;
  uint64_t seq_ = 0;
};

// ------------------------------------------------------------------ assertions

json json_ids(NodeMask m) {
  json arr = json::array();
  for (NodeId v : mask_to_ids(m)) arr.push_back(v);
  return arr;
}

json json_edges(const Digraph& g) {
  json arr = json::array();
  for (auto [u, v] : g.edge_list()) arr.push_back(json::array({u, v}));
  return arr;
}

// Mismatch description, or nullopt when the assertion holds.
std::optional<std::string> eval_assertion(const Assertion& x, const SystemState& s,
                                          const SystemConfig& cfg) {
  const int n = cfg.n;
  auto arg = [&](size_t i) -> int {
    if (i >= x.args.size() || x.args[i] < 0 || x.args[i] >= n) return -1;
    return x.args[i];
  };
  json actual;
  if (x.kind == "m_set") {
    int p = arg(0);
    if (p < 0) return "m_set needs args [p]";
    actual = json_ids(s.servers[p].m);
  } else if (x.kind == "f_set") {
    int p = arg(0), t = arg(1);
    if (p < 0 || t < 0) return "f_set needs args [p,t]";
    actual = json_ids(s.servers[p].f[t]);
  } else if (x.kind == "td_nodes") {
    int p = arg(0), root = arg(1);
    if (p < 0 || root < 0) return "td_nodes needs args [p,root]";
    actual = json_ids(s.servers[p].g[root].nodes());
  } else if (x.kind == "td_edges") {
    int p = arg(0), root = arg(1);
    if (p < 0 || root < 0) return "td_edges needs args [p,root]";
    actual = json_edges(s.servers[p].g[root]);
  } else if (x.kind == "td_empty") {
    int p = arg(0), root = arg(1);
    if (p < 0 || root < 0) return "td_empty needs args [p,root]";
    actual = s.servers[p].g[root].empty();
  } else if (x.kind == "td_build_nodes") {
    int p = arg(0), root = arg(1);
    if (p < 0 || root < 0) return "td_build_nodes needs args [p,root]";
    actual = json_ids(td_build(static_cast<NodeId>(root), s.servers[p].f, cfg.overlay).nodes());
  } else if (x.kind == "rtd_nodes") {
    int p = arg(0), root = arg(1);
    if (p < 0 || root < 0) return "rtd_nodes needs args [p,root]";
    actual = json_ids(rtd_build(static_cast<NodeId>(root), s.servers[p].f,
                                has(s.servers[p].m, static_cast<NodeId>(root)), cfg.overlay)
                          .nodes());
  } else if (x.kind == "done") {
    int p = arg(0);
    if (p < 0) return "done needs args [p]";
    actual = s.servers[p].done;
  } else if (x.kind == "nf") {
    int p = arg(0);
    if (p < 0) return "nf needs args [p]";
    actual = s.servers[p].nf;
  } else if (x.kind == "m_equal_live") {
    bool eq = true;
    int first = -1;
    for (NodeId p = 0; p < n; ++p) {
      if (!s.servers[p].nf) continue;
      if (first < 0)
        first = p;
      else
        eq = eq && s.servers[p].m == s.servers[first].m;
    }
    actual = eq;
  } else {
    return "unknown assertion kind '" + x.kind + "'";
  }
  if (actual.dump() != x.expected_json)
    return x.kind + " expected " + x.expected_json + ", got " + actual.dump();
  return std::nullopt;
}

// ------------------------------------------------------------------ fingerprints

class FpSet {
 public:
  explicit FpSet(size_t initial_pow2 = 1 << 16) : slots_(initial_pow2, {0, 0}) {}

  // true when newly inserted.
  bool insert(std::pair<uint64_t, uint64_t> fp) {
    if (fp.first == 0 && fp.second == 0) fp = {0x9e3779b97f4a7c15ULL, 1};
    if ((count_ + 1) * 5 > slots_.size() * 3) grow();
    return insert_slot(fp);
  }

  size_t size() const { return count_; }

 private:
  bool insert_slot(std::pair<uint64_t, uint64_t> fp) {
    size_t mask = slots_.size() - 1;
    size_t i = fp.first & mask;
    for (;;) {
      auto& slot = slots_[i];
      if (slot.first == 0 && slot.second == 0) {
        slot = fp;
        ++count_;
        return true;
      }
      if (slot == fp) return false;
      i = (i + 1) & mask;
    }
  }

  void grow() {
    std::vector<std::pair<uint64_t, uint64_t>> old = std::move(slots_);
    slots_.assign(old.size() * 2, {0, 0});
    count_ = 0;
    for (auto& fp : old)
      if (!(fp.first == 0 && fp.second == 0)) insert_slot(fp);
  }

  std::vector<std::pair<uint64_t, uint64_t>> slots_;
  size_t count_ = 0;
};

uint32_t resolve_checks(const Scenario& sc, RunMode mode) {
  return parse_checks(sc.checks.empty() ? default_checks(mode) : sc.checks);
}

void finalize_stats(Report& r, const Stats& st) {
  for (int i = 0; i < kCheckCount; ++i)
    if (st[i].checked || st[i].violations) r.properties[kCheckNames[i]] = st[i];
}

Violation make_violation(const Hit& hit, std::vector<Action> prefix, int sched_idx = -1,
                         uint64_t sched_seed = 0) {
  Violation v;
  v.property = kCheckNames[hit.id];
  v.detail = hit.detail;
  v.prefix = std::move(prefix);
  v.schedule_index = sched_idx;
  v.schedule_seed = sched_seed;
  return v;
}

}  // namespace

std::vector<std::string> default_checks(RunMode mode) {
  std::vector<std::string> base = {
      "accuracy",         "integrity",      "set_agreement", "set_agreement_strong",
      "td_invariants",    "td_equivalence", "rtd_superset",  "rtd_invariant",
      "done_stability",   "removal_trichotomy", "rtd_monotonicity",
      "quiescent_termination",
  };
  if (mode != RunMode::kExhaustive) {
    base.insert(base.end(), {"path_witness", "holder_tracked", "link_fifo", "fd_ordering"});
  }
  return base;
}

std::vector<std::string> known_checks() {
  std::vector<std::string> out;
  for (int i = 0; i < kCheckCount; ++i) out.emplace_back(kCheckNames[i]);
  return out;
}

// ------------------------------------------------------------------- exhaustive

Report explore_exhaustive(const Scenario& sc) {
  Report r;
  Stats st{};
  const SystemConfig& cfg = sc.cfg;
  const uint32_t mask = resolve_checks(sc, RunMode::kExhaustive);

  struct Entry {
    uint32_t parent;
    uint16_t depth;
    Action act;
  };
  constexpr uint32_t kRoot = UINT32_MAX;
  std::vector<Entry> entries;
  FpSet visited;
  std::deque<uint32_t> frontier;

  // Root entry occupies index 0 with a dummy action; walking parents up to it
  // recovers the action prefix of any visited state.
  auto chain = [&](uint32_t idx) {
    std::vector<Action> acts;
    for (uint32_t i = idx; entries[i].parent != kRoot; i = entries[i].parent)
      acts.push_back(entries[i].act);
    std::reverse(acts.begin(), acts.end());
    return acts;
  };

  SystemState s0 = init(cfg);
  visited.insert(fingerprint(s0));
  entries.push_back({kRoot, 0, Action{}});
  frontier.push_back(0);
  r.states = 1;

  if (auto hit = check_state(s0, cfg, mask, st)) {
    r.status = "fail";
    r.violation = make_violation(*hit, {});
    finalize_stats(r, st);
    return r;
  }

  bool budget_hit = false;
  SystemState cur;
  while (!frontier.empty()) {
    const uint32_t idx = frontier.front();
    frontier.pop_front();
    // Rebuild the state by replaying the action chain from the initial state;
    // the frontier then only stores indices.
    cur = init(cfg);
    for (const Action& a : chain(idx)) apply(cur, cfg, a);
    r.max_depth = std::max(r.max_depth, static_cast<int>(entries[idx].depth));

    std::vector<Action> acts = enabled_actions(cur, cfg);
    if (acts.empty()) {
      ++r.terminals;
      if (auto hit = check_terminal(cur, cfg, mask, st)) {
        r.status = "fail";
        r.violation = make_violation(*hit, chain(idx));
        finalize_stats(r, st);
        return r;
      }
      if (r.terminal_states.size() < 20000) {
        TerminalInfo t;
        for (const ServerState& sv : cur.servers) t.m.push_back(sv.m);
        for (NodeId p = 0; p < cfg.n; ++p) {
          if (cur.servers[p].done) t.done |= bit(p);
          if (cur.servers[p].nf) t.live |= bit(p);
        }
        r.terminal_states.push_back(std::move(t));
      }
      continue;
    }

    for (const Action& a : acts) {
      SystemState next = cur;
      TraceEvent ev = apply(next, cfg, a);
      ++r.transitions;
      if (auto hit = check_transition(cur, a, ev, next, cfg, mask, st)) {
        auto pre = chain(idx);
        pre.push_back(a);
        r.status = "fail";
        r.violation = make_violation(*hit, std::move(pre));
        finalize_stats(r, st);
        return r;
      }
      if (visited.insert(fingerprint(next))) {
        if (auto hit = check_state(next, cfg, mask, st)) {
          auto pre = chain(idx);
          pre.push_back(a);
          r.status = "fail";
          r.violation = make_violation(*hit, std::move(pre));
          finalize_stats(r, st);
          return r;
        }
        if (entries.size() >= sc.max_states) {
          budget_hit = true;
          break;
        }
        entries.push_back({idx, static_cast<uint16_t>(entries[idx].depth + 1), a});
        frontier.push_back(static_cast<uint32_t>(entries.size() - 1));
        ++r.states;
      }
    }
    if (budget_hit) break;
  }

  finalize_stats(r, st);
  if (budget_hit) {
    r.status = "inconclusive";
    r.detail = "state budget " + std::to_string(sc.max_states) +
               " exceeded; exploration truncated";
  }
  return r;
}

// ------------------------------------------------------------------------ fuzz

namespace {

// Weighted pick: failure actions with probability sc.failure_weight when a
// non-failure alternative exists, uniform otherwise.
Action pick_action(const std::vector<Action>& acts, Rng& rng, double failure_weight) {
  size_t n_fail = 0;
  for (const Action& a : acts)
    if (a.kind == ActionKind::kFail) ++n_fail;
  const size_t n_other = acts.size() - n_fail;
  auto nth = [&](bool want_fail, size_t k) {
    for (const Action& a : acts)
      if ((a.kind == ActionKind::kFail) == want_fail && k-- == 0) return a;
    return acts.back();
  };
  if (n_other == 0) return nth(true, rng.below(n_fail));
  if (n_fail > 0 && rng.real() < failure_weight) return nth(true, rng.below(n_fail));
  return nth(false, rng.below(n_other));
}

}  // namespace

Report fuzz_schedules(const Scenario& sc, std::ostream* trace) {
  Report r;
  Stats st{};
  const SystemConfig& cfg = sc.cfg;
  const uint32_t mask = resolve_checks(sc, RunMode::kFuzz);

  for (int i = 0; i < sc.n_schedules; ++i) {
    const uint64_t seed_i = Rng::substream(sc.seed, static_cast<uint64_t>(i));
    Rng rng(seed_i);
    if (trace) {
      json hdr;
      hdr["type"] = "schedule";
      hdr["schedule"] = i;
      hdr["seed"] = seed_i;
      *trace << hdr.dump() << "\n";
    }
    SystemState s = init(cfg);
    TraceChecker tc(cfg, mask);
    std::vector<Action> prefix;
    ++r.schedules_run;

    auto fail_with = [&](const Hit& hit) {
      r.status = "fail";
      r.violation = make_violation(hit, prefix, i, seed_i);
    };

    if (auto hit = check_state(s, cfg, mask, st)) {
      fail_with(*hit);
      break;
    }

    bool quiescent = false;
    SystemState prev;
    for (int step = 0; step < sc.step_cap; ++step) {
      std::vector<Action> acts = enabled_actions(s, cfg);
      if (acts.empty()) {
        quiescent = true;
        if (auto hit = check_terminal(s, cfg, mask, st)) fail_with(*hit);
        break;
      }
      Action a = pick_action(acts, rng, sc.failure_weight);
      prev = s;
      TraceEvent ev = apply(s, cfg, a);
      prefix.push_back(a);
      ++r.transitions;
      if (trace) *trace << trace_line(static_cast<uint64_t>(step), ev);
      if (auto hit = check_transition(prev, a, ev, s, cfg, mask, st)) {
        fail_with(*hit);
        break;
      }
      if (TraceChecker::wants(mask)) {
        if (auto hit = tc.on_event(ev, s, st)) {
          fail_with(*hit);
          break;
        }
      }
      if (auto hit = check_state(s, cfg, mask, st)) {
        fail_with(*hit);
        break;
      }
    }
    if (quiescent) ++r.schedules_quiescent;
    if (r.violation) break;
  }

  finalize_stats(r, st);
  return r;
}

// ---------------------------------------------------------------------- replay

Report replay_scenario(const Scenario& sc, std::ostream* trace) {
  Report r;
  Stats st{};
  const SystemConfig& cfg = sc.cfg;
  const uint32_t mask = resolve_checks(sc, RunMode::kReplay);

  SystemState s = init(cfg);
  TraceChecker tc(cfg, mask);
  std::vector<Action> prefix;
  uint64_t step = 0;

  auto fail_with = [&](const Hit& hit) {
    r.status = "fail";
    r.violation = make_violation(hit, prefix);
  };
  auto run_assertions = [&](int mark) -> bool {
    for (const Assertion& x : sc.assertions) {
      if (x.after_step != mark) continue;
      ++st[kAssertion].checked;
      if (auto mismatch = eval_assertion(x, s, cfg)) {
        ++st[kAssertion].violations;
        fail_with(Hit{kAssertion, "step " + std::to_string(mark) + ": " + *mismatch});
        return false;
      }
    }
    return true;
  };
  auto step_checks = [&](const SystemState& prev, const Action& a, const TraceEvent& ev) -> bool {
    if (auto hit = check_transition(prev, a, ev, s, cfg, mask, st)) {
      fail_with(*hit);
      return false;
    }
    if (TraceChecker::wants(mask)) {
      if (auto hit = tc.on_event(ev, s, st)) {
        fail_with(*hit);
        return false;
      }
    }
    if (auto hit = check_state(s, cfg, mask, st)) {
      fail_with(*hit);
      return false;
    }
    return true;
  };

  if (auto hit = check_state(s, cfg, mask, st)) {
    fail_with(*hit);
    finalize_stats(r, st);
    return r;
  }

  SystemState prev;
  for (size_t k = 0; k < sc.actions.size(); ++k) {
    const Action& a = sc.actions[k];
    if (!action_enabled(s, cfg, a)) {
      r.status = "scenario_error";
      r.detail = "action #" + std::to_string(k + 1) + " (" + action_name(a) +
                 ") is not enabled at its position";
      finalize_stats(r, st);
      return r;
    }
    prev = s;
    TraceEvent ev = apply(s, cfg, a);
    prefix.push_back(a);
    ++r.transitions;
    if (trace) *trace << trace_line(step++, ev);
    if (!step_checks(prev, a, ev)) break;
    if (!run_assertions(static_cast<int>(k + 1))) break;
  }

  if (!r.violation && sc.drain) {
    // Fairness mode: take the first enabled non-failure action until no such
    // action remains. No further failures are injected during the drain.
    int budget = sc.step_cap;
    for (;;) {
      std::vector<Action> acts = enabled_actions(s, cfg);
      const Action* choice = nullptr;
      for (const Action& a : acts)
        if (a.kind != ActionKind::kFail) {
          choice = &a;
          break;
        }
      if (!choice) break;
      if (budget-- == 0) {
        r.status = "scenario_error";
        r.detail = "drain exceeded step cap " + std::to_string(sc.step_cap);
        finalize_stats(r, st);
        return r;
      }
      Action a = *choice;
      prev = s;
      TraceEvent ev = apply(s, cfg, a);
      prefix.push_back(a);
      ++r.transitions;
      if (trace) *trace << trace_line(step++, ev);
      if (!step_checks(prev, a, ev)) break;
    }
  }

  if (!r.violation && r.status == "pass") {
    if (enabled_actions(s, cfg).empty()) {
      if (auto hit = check_terminal(s, cfg, mask, st)) fail_with(*hit);
    }
    if (!r.violation) run_assertions(-1);
  }

  finalize_stats(r, st);
  return r;
}

Report run_scenario(const Scenario& sc, std::ostream* trace) {
  switch (sc.mode) {
    case RunMode::kExhaustive: return explore_exhaustive(sc);
    case RunMode::kFuzz: return fuzz_schedules(sc, trace);
    case RunMode::kReplay: return replay_scenario(sc, trace);
  }
  return {};
}

// ------------------------------------------------------------------- reporting

std::string report_to_json(const Report& r, const std::string& counterexample_file) {
  json j;
  j["status"] = r.status;
  if (!r.detail.empty()) j["detail"] = r.detail;
  json verdicts = json::array();
  for (const auto& [name, stat] : r.properties) {
    json v;
    v["property"] = name;
    v["runs"] = stat.checked;
    v["violations"] = stat.violations;
    verdicts.push_back(v);
  }
  j["verdicts"] = verdicts;
  json stats;
  stats["states"] = r.states;
  stats["transitions"] = r.transitions;
  stats["terminals"] = r.terminals;
  stats["maxDepth"] = r.max_depth;
  stats["schedules"] = r.schedules_run;
  stats["quiescent"] = r.schedules_quiescent;
  j["stats"] = stats;
  if (r.violation) {
    json v;
    v["property"] = r.violation->property;
    v["detail"] = r.violation->detail;
    v["prefixLength"] = r.violation->prefix.size();
    if (r.violation->schedule_index >= 0) {
      v["scheduleIndex"] = r.violation->schedule_index;
      v["scheduleSeed"] = r.violation->schedule_seed;
    }
    j["violation"] = v;
  }
  if (!counterexample_file.empty()) j["counterexampleFile"] = counterexample_file;
  return j.dump(2) + "\n";
}

Scenario counterexample_scenario(const Scenario& base, const Violation& v) {
  Scenario sc;
  sc.name = base.name + "_counterexample";
  sc.cfg = base.cfg;
  sc.mode = RunMode::kReplay;
  sc.actions = v.prefix;
  sc.checks = base.checks.empty()
                  ? default_checks(base.mode == RunMode::kExhaustive ? RunMode::kExhaustive
                                                                     : RunMode::kReplay)
                  : base.checks;
  sc.drain = false;
  sc.step_cap = base.step_cap;
  sc.seed = base.seed;
  return sc;
}

}  // namespace allconcur
