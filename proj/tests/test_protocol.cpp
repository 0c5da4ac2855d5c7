#include <doctest.h>

#include <algorithm>

#include "allconcur/protocol.hpp"
#include "allconcur/rng.hpp"

using namespace allconcur;

namespace {

SystemConfig make_cfg(int n, int f, Digraph g) {
  SystemConfig cfg;
  cfg.n = n;
  cfg.f = f;
  cfg.overlay = std::move(g);
  return cfg;
}

// Canonical drain: apply the first enabled non-failure action until none is.
void drain(SystemState& s, const SystemConfig& cfg) {
  for (;;) {
    std::vector<Action> acts = enabled_actions(s, cfg);
    auto it = std::find_if(acts.begin(), acts.end(),
                           [](const Action& a) { return a.kind != ActionKind::kFail; });
    if (it == acts.end()) return;
    apply(s, cfg, *it);
  }
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS(validate_config(make_cfg(1, 0, make_complete(1))));
  CHECK_THROWS(validate_config(make_cfg(3, 3, make_complete(3))));
  CHECK_THROWS(validate_config(make_cfg(3, 2, make_complete(3))));   // needs kappa > f
  CHECK_THROWS(validate_config(make_cfg(4, 0, make_complete(3))));   // wrong universe
  CHECK_NOTHROW(validate_config(make_cfg(3, 1, make_complete(3))));
  CHECK_NOTHROW(validate_config(make_cfg(9, 2, make_circulant(9, {1, 2, 4}))));
}

TEST_CASE("initial state shape and enabled actions") {
  SystemConfig cfg = make_cfg(3, 1, make_complete(3));
  SystemState s = init(cfg);

  REQUIRE(s.servers.size() == 3);
  for (NodeId p = 0; p < 3; ++p) {
    const ServerState& sv = s.servers[p];
    CHECK(sv.m == 0);
    CHECK(sv.nf);
    CHECK_FALSE(sv.ab);
    CHECK_FALSE(sv.done);
    REQUIRE(sv.g.size() == 3);
    for (NodeId q = 0; q < 3; ++q) CHECK(sv.g[q] == Digraph::singleton(3, q));
  }

  std::vector<Action> want = {
      {ActionKind::kAbcast, 0, 0}, {ActionKind::kAbcast, 1, 0}, {ActionKind::kAbcast, 2, 0},
      {ActionKind::kFail, 0, 0},   {ActionKind::kFail, 1, 0},   {ActionKind::kFail, 2, 0},
  };
  CHECK(enabled_actions(s, cfg) == want);

  SystemConfig safe = make_cfg(3, 0, make_complete(3));
  SystemState s0 = init(safe);
  for (const Action& a : enabled_actions(s0, safe)) CHECK(a.kind == ActionKind::kAbcast);
}

TEST_CASE("abcast fills buffers and is one-shot") {
  SystemConfig cfg = make_cfg(3, 1, make_complete(3));
  SystemState s = init(cfg);
  apply(s, cfg, {ActionKind::kAbcast, 0, 0});

  CHECK(s.servers[0].m == bit(0));
  CHECK(s.servers[0].ab);
  CHECK(s.servers[0].g[0].empty());
  REQUIRE(s.net.send_buf[0].size() == 1);
  CHECK(s.net.send_buf[0][0].msg == Message::bcast(0));
  CHECK(s.net.send_buf[0][0].dests == (bit(1) | bit(2)));
  CHECK_FALSE(action_enabled(s, cfg, {ActionKind::kAbcast, 0, 0}));

  apply(s, cfg, {ActionKind::kFail, 1, 0});
  CHECK_FALSE(action_enabled(s, cfg, {ActionKind::kAbcast, 1, 0}));  // failed server
}

TEST_CASE("receiving a first message forwards it and triggers own broadcast") {
  SystemConfig cfg = make_cfg(3, 1, make_complete(3));
  SystemState s = init(cfg);
  apply(s, cfg, {ActionKind::kAbcast, 0, 0});
  apply(s, cfg, {ActionKind::kTx, 0, 0});  // -> 1
  REQUIRE(s.net.recv_buf[1].size() == 1);

  TraceEvent ev = apply(s, cfg, {ActionKind::kReceive, 1, 0});
  CHECK(ev.type == TraceEvent::Type::kRecvBcast);
  CHECK(s.servers[1].m == (bit(0) | bit(1)));
  CHECK(s.servers[1].ab);
  CHECK(s.servers[1].g[0].empty());
  // forwarded copy (to 2 only: owner excluded) precedes its own broadcast
  REQUIRE(s.net.send_buf[1].size() == 2);
  CHECK(s.net.send_buf[1][0].msg == Message::bcast(0));
  CHECK(s.net.send_buf[1][0].dests == bit(2));
  CHECK(s.net.send_buf[1][1].msg == Message::bcast(1));
  CHECK(s.net.send_buf[1][1].dests == (bit(0) | bit(2)));
}

TEST_CASE("duplicates are consumed without effect") {
  SystemConfig cfg = make_cfg(3, 1, make_complete(3));
  SystemState s = init(cfg);
  apply(s, cfg, {ActionKind::kAbcast, 0, 0});
  apply(s, cfg, {ActionKind::kTx, 0, 0});      // BCAST(0) -> 1
  apply(s, cfg, {ActionKind::kTx, 0, 0});      // BCAST(0) -> 2
  apply(s, cfg, {ActionKind::kReceive, 1, 0});
  apply(s, cfg, {ActionKind::kReceive, 2, 0});
  // 2 forwards BCAST(0) to 1
  apply(s, cfg, {ActionKind::kTx, 2, 0});
  REQUIRE(s.net.recv_buf[1].size() == 1);

  SystemState before = s;
  TraceEvent ev = apply(s, cfg, {ActionKind::kReceive, 1, 0});
  CHECK(ev.type == TraceEvent::Type::kDeliver);
  before.net.recv_buf[1].pop_front();
  CHECK(s == before);  // nothing but the pop
}

TEST_CASE("failure notifications update every digraph containing the target") {
  SystemConfig cfg = make_cfg(3, 1, make_complete(3));
  SystemState s = init(cfg);
  apply(s, cfg, {ActionKind::kFail, 0, 0});
  apply(s, cfg, {ActionKind::kDetect, 1, 0});
  apply(s, cfg, {ActionKind::kReceive, 1, 0});

  CHECK(s.servers[1].f[0] == bit(1));
  CHECK(s.servers[1].g[0].nodes() == (bit(0) | bit(2)));  // own digraph for root 0 expanded
  CHECK(s.servers[1].g[1] == Digraph::singleton(3, 1));   // others untouched
  CHECK(s.servers[1].g[2] == Digraph::singleton(3, 2));
  REQUIRE(s.net.send_buf[1].size() == 1);  // notification forwarded
  CHECK(s.net.send_buf[1][0].msg == Message::fail(1, 0));
  CHECK(s.net.send_buf[1][0].dests == bit(2));

  // duplicate notification: consumed, no state change
  s.net.recv_buf[1].push_back(Message::fail(1, 0));
  SystemState before = s;
  TraceEvent ev = apply(s, cfg, {ActionKind::kReceive, 1, 0});
  CHECK(ev.type == TraceEvent::Type::kDeliver);
  before.net.recv_buf[1].pop_front();
  CHECK(s == before);
}

TEST_CASE("fail respects the budget and freezes the server") {
  SystemConfig cfg = make_cfg(4, 1, make_circulant(4, {1, 2}));
  SystemState s = init(cfg);
  apply(s, cfg, {ActionKind::kAbcast, 0, 0});
  apply(s, cfg, {ActionKind::kFail, 0, 0});

  CHECK_FALSE(s.servers[0].nf);
  CHECK(s.failed_count == 1);
  for (NodeId p = 1; p < 4; ++p)
    CHECK_FALSE(action_enabled(s, cfg, {ActionKind::kFail, p, 0}));  // budget spent
  // in-flight copies in 0's send buffer are stuck
  CHECK_FALSE(action_enabled(s, cfg, {ActionKind::kTx, 0, 0}));
  CHECK_FALSE(s.net.send_buf[0].empty());

  SystemConfig leaky = cfg;
  leaky.tx_from_failed = true;
  CHECK(action_enabled(s, leaky, {ActionKind::kTx, 0, 0}));
}

TEST_CASE("adeliver needs empty digraphs and delivers ascending") {
  SystemConfig cfg = make_cfg(2, 0, make_complete(2));
  SystemState s = init(cfg);
  CHECK_FALSE(action_enabled(s, cfg, {ActionKind::kAdeliver, 0, 0}));
  drain(s, cfg);

  REQUIRE(enabled_actions(s, cfg).empty());  // quiescent
  for (NodeId p = 0; p < 2; ++p) {
    CHECK(s.servers[p].done);
    CHECK(s.servers[p].m == (bit(0) | bit(1)));
    CHECK_FALSE(action_enabled(s, cfg, {ActionKind::kAdeliver, p, 0}));  // one-shot
  }
}

TEST_CASE("delivery event reports ascending order") {
  SystemConfig cfg = make_cfg(3, 0, make_complete(3));
  SystemState s = init(cfg);
  std::vector<Action> picked;
  for (;;) {
    std::vector<Action> acts = enabled_actions(s, cfg);
    if (acts.empty()) break;
    TraceEvent ev = apply(s, cfg, acts.front());
    if (ev.type == TraceEvent::Type::kAdeliver)
      CHECK(ev.order == std::vector<NodeId>{0, 1, 2});
  }
}

TEST_CASE("enabled_actions agrees with per-action probing on random walks") {
  SystemConfig cfg = make_cfg(4, 1, make_circulant(4, {1, 2}));
  Rng rng(3);
  for (int walk = 0; walk < 40; ++walk) {
    SystemState s = init(cfg);
    for (int step = 0; step < 60; ++step) {
      std::vector<Action> acts = enabled_actions(s, cfg);

      std::vector<Action> probed;
      for (ActionKind kind :
           {ActionKind::kAbcast, ActionKind::kAdeliver, ActionKind::kReceive, ActionKind::kTx,
            ActionKind::kFail})
        for (NodeId p = 0; p < 4; ++p)
          if (action_enabled(s, cfg, {kind, p, 0})) probed.push_back({kind, p, 0});
      for (NodeId p = 0; p < 4; ++p)
        for (NodeId q = 0; q < 4; ++q)
          if (p != q && action_enabled(s, cfg, {ActionKind::kDetect, p, q}))
            probed.push_back({ActionKind::kDetect, p, q});
      CHECK(acts == probed);

      if (acts.empty()) break;
      apply(s, cfg, acts[rng.below(acts.size())]);
    }
  }
}
