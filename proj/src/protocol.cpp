#include "allconcur/protocol.hpp"

#include <cassert>
#include <stdexcept>

#include "allconcur/hash.hpp"

namespace allconcur {

void validate_config(const SystemConfig& cfg) {
  if (cfg.n < 2 || cfg.n > kMaxNodes) throw std::invalid_argument("config: n out of range [2,64]");
  if (cfg.overlay.universe() != cfg.n || cfg.overlay.node_count() != cfg.n)
    throw std::invalid_argument("config: overlay must cover servers 0..n-1");
  if (cfg.f < 0 || cfg.f >= cfg.n) throw std::invalid_argument("config: f out of range [0,n)");
  if (vertex_connectivity(cfg.overlay) <= cfg.f)
    throw std::invalid_argument("config: overlay connectivity must exceed f");
}

SystemState init(const SystemConfig& cfg) {
  validate_config(cfg);
  SystemState s;
  s.servers.resize(static_cast<size_t>(cfg.n));
  for (NodeId p = 0; p < cfg.n; ++p) {
    ServerState& sv = s.servers[p];
    sv.f.assign(static_cast<size_t>(cfg.n), 0);
    sv.g.reserve(static_cast<size_t>(cfg.n));
    for (NodeId q = 0; q < cfg.n; ++q) sv.g.push_back(td_init(cfg.n, q));
  }
  s.net = NetState(cfg.n);
  s.fd = FdMatrix(cfg.n);
  return s;
}

namespace {

bool tracking_empty(const ServerState& sv) {
  for (const Digraph& td : sv.g)
    if (!td.empty()) return false;
  return true;
}

NodeMask live_mask(const SystemState& s) {
  NodeMask m = 0;
  for (size_t p = 0; p < s.servers.size(); ++p)
    if (s.servers[p].nf) m |= bit(static_cast<NodeId>(p));
  return m;
}

// Abcast effects; shared by the Abcast action and the receive trigger.
void do_abcast(SystemState& s, const SystemConfig& cfg, NodeId p) {
  ServerState& sv = s.servers[p];
  assert(sv.nf && !sv.ab);
  sv.m |= bit(p);
  sv.g[p].clear();
  sv.ab = true;
  send_msg(s.net, p, {Message::bcast(p)}, live_mask(s), cfg.overlay);
}

void recv_bcast(SystemState& s, const SystemConfig& cfg, NodeId p, const Message& m) {
  ServerState& sv = s.servers[p];
  assert(!has(sv.m, m.o));
  assert(s.servers[m.o].ab);
  sv.m |= bit(m.o);
  sv.g[m.o].clear();
  send_msg(s.net, p, {m}, live_mask(s), cfg.overlay);
  if (!sv.ab) do_abcast(s, cfg, p);  // receiving a message triggers own broadcast
}

void recv_fail(SystemState& s, const SystemConfig& cfg, NodeId p, const Message& m) {
  ServerState& sv = s.servers[p];
  assert(!has(sv.f[m.t], m.o));
  sv.f[m.t] |= bit(m.o);
  for (NodeId root = 0; root < cfg.n; ++root) {
    if (sv.g[root].contains(m.t))
      td_update_recursive(sv.g[root], root, m.o, m.t, sv.f, cfg.overlay, has(sv.m, root),
                          cfg.mutation == Mutation::kTdIncludeNotifier);
  }
  if (cfg.mutation != Mutation::kDropFailForwarding)
    send_msg(s.net, p, {m}, live_mask(s), cfg.overlay);
}

}  // namespace

bool action_enabled(const SystemState& s, const SystemConfig& cfg, const Action& a) {
  const ServerState& sv = s.servers[a.p];
  switch (a.kind) {
    case ActionKind::kAbcast:
      return sv.nf && !sv.ab;
    case ActionKind::kAdeliver:
      return sv.nf && sv.ab && !sv.done &&
             (cfg.mutation == Mutation::kAdeliverIgnoreTracking || tracking_empty(sv));
    case ActionKind::kReceive:
      return sv.nf && !s.net.recv_buf[a.p].empty();
    case ActionKind::kTx:
      return (sv.nf || cfg.tx_from_failed) && !s.net.send_buf[a.p].empty();
    case ActionKind::kFail:
      return sv.nf && s.failed_count < cfg.f;
    case ActionKind::kDetect:
      return sv.nf && !s.servers[a.q].nf && has(successors(cfg.overlay, a.q), a.p) &&
             !s.fd.has_detected(a.p, a.q);
  }
  return false;
}

std::vector<Action> enabled_actions(const SystemState& s, const SystemConfig& cfg) {
  std::vector<Action> out;
  for (ActionKind kind : {ActionKind::kAbcast, ActionKind::kAdeliver, ActionKind::kReceive,
                          ActionKind::kTx, ActionKind::kFail}) {
    for (NodeId p = 0; p < cfg.n; ++p) {
      Action a{kind, p, 0};
      if (action_enabled(s, cfg, a)) out.push_back(a);
    }
  }
  for (NodeId p = 0; p < cfg.n; ++p)
    for (NodeId q = 0; q < cfg.n; ++q) {
      Action a{ActionKind::kDetect, p, q};
      if (p != q && action_enabled(s, cfg, a)) out.push_back(a);
    }
  return out;
}

TraceEvent apply(SystemState& s, const SystemConfig& cfg, const Action& a) {
  assert(action_enabled(s, cfg, a));
  TraceEvent ev;
  ServerState& sv = s.servers[a.p];
  switch (a.kind) {
    case ActionKind::kAbcast:
      do_abcast(s, cfg, a.p);
      ev.type = TraceEvent::Type::kAbcast;
      ev.a = a.p;
      break;
    case ActionKind::kAdeliver:
      sv.done = true;
      ev.type = TraceEvent::Type::kAdeliver;
      ev.a = a.p;
      ev.order = mask_to_ids(sv.m);  // deterministic delivery order: ascending owner id
      break;
    case ActionKind::kReceive: {
      Message m = deliver_msg(s.net, a.p);
      if (m.kind == MsgKind::BCAST) {
        if (!has(sv.m, m.o)) {
          recv_bcast(s, cfg, a.p, m);
          ev.type = TraceEvent::Type::kRecvBcast;
        } else {
          ev.type = TraceEvent::Type::kDeliver;  // duplicate, discarded
        }
      } else {
        if (!has(sv.f[m.t], m.o)) {
          recv_fail(s, cfg, a.p, m);
          ev.type = TraceEvent::Type::kRecvFail;
        } else {
          ev.type = TraceEvent::Type::kDeliver;
        }
      }
      ev.a = a.p;
      ev.msg = m;
      break;
    }
    case ActionKind::kTx: {
      auto [to, m] = tx_msg(s.net, a.p);
      ev.type = TraceEvent::Type::kTx;
      ev.a = a.p;
      ev.b = to;
      ev.msg = m;
      break;
    }
    case ActionKind::kFail:
      sv.nf = false;
      ++s.failed_count;
      ev.type = TraceEvent::Type::kFail;
      ev.a = a.p;
      break;
    case ActionKind::kDetect:
      s.fd.mark(a.p, a.q);
      s.net.recv_buf[a.p].push_back(Message::fail(a.p, a.q));
      ev.type = TraceEvent::Type::kDetect;
      ev.a = a.p;
      ev.b = a.q;
      break;
  }
  return ev;
}

std::string action_name(const Action& a) {
  switch (a.kind) {
    case ActionKind::kAbcast: return "abcast(" + std::to_string(a.p) + ")";
    case ActionKind::kAdeliver: return "adeliver(" + std::to_string(a.p) + ")";
    case ActionKind::kReceive: return "receive(" + std::to_string(a.p) + ")";
    case ActionKind::kTx: return "tx(" + std::to_string(a.p) + ")";
    case ActionKind::kFail: return "fail(" + std::to_string(a.p) + ")";
    case ActionKind::kDetect:
      return "detect(" + std::to_string(a.p) + "," + std::to_string(a.q) + ")";
  }
  return "?";
}

namespace {

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

}  // namespace

void serialize(const SystemState& s, std::vector<uint8_t>& out) {
  out.clear();
  const int n = static_cast<int>(s.servers.size());
  out.push_back(s.failed_count);
  for (const ServerState& sv : s.servers) {
    put_u64(out, sv.m);
    out.push_back(static_cast<uint8_t>(sv.nf | (sv.ab << 1) | (sv.done << 2)));
    for (NodeMask fm : sv.f) put_u64(out, fm);
    for (const Digraph& td : sv.g) {
      put_u64(out, td.nodes());
      for (NodeId u = 0; u < n; ++u) put_u64(out, td.contains(u) ? td.out(u) : 0);
    }
  }
  for (NodeMask d : s.fd.detected) put_u64(out, d);
  for (const auto& buf : s.net.send_buf) {
    put_u32(out, static_cast<uint32_t>(buf.size()));
    for (const SendEntry& e : buf) {
      out.push_back(static_cast<uint8_t>(e.msg.kind));
      out.push_back(e.msg.o);
      out.push_back(e.msg.t);
      put_u64(out, e.dests);
    }
  }
  for (const auto& buf : s.net.recv_buf) {
    put_u32(out, static_cast<uint32_t>(buf.size()));
    for (const Message& m : buf) {
      out.push_back(static_cast<uint8_t>(m.kind));
      out.push_back(m.o);
      out.push_back(m.t);
    }
  }
}

std::pair<uint64_t, uint64_t> fingerprint(const SystemState& s) {
  std::vector<uint8_t> bytes;
  serialize(s, bytes);
  return murmur3_128(bytes.data(), bytes.size());
}

}  // namespace allconcur
