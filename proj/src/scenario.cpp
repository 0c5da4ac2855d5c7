#include "allconcur/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace allconcur {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error("scenario: " + what); }

Digraph parse_graph(const json& j) {
  if (j.contains("circulant")) {
    const json& c = j.at("circulant");
    if (!c.contains("n") || !c.contains("offsets")) fail("circulant needs n and offsets");
    return make_circulant(c.at("n").get<int>(), c.at("offsets").get<std::vector<int>>());
  }
  if (j.contains("nodes")) {
    int n = j.at("nodes").get<int>();
    if (n < 1 || n > kMaxNodes) fail("graph nodes out of range");
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const json& e : j.value("edges", json::array())) {
      if (!e.is_array() || e.size() != 2) fail("edge must be [u,v]");
      int u = e[0].get<int>(), v = e[1].get<int>();
      if (u < 0 || u >= n || v < 0 || v >= n) fail("edge endpoint out of range");
      edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    return Digraph::from_edges(n, edges);
  }
  fail("graph must be {\"nodes\",\"edges\"} or {\"circulant\":{...}}");
}

ActionKind parse_action_kind(const std::string& t) {
  if (t == "abcast") return ActionKind::kAbcast;
  if (t == "adeliver") return ActionKind::kAdeliver;
  if (t == "receive") return ActionKind::kReceive;
  if (t == "tx") return ActionKind::kTx;
  if (t == "fail") return ActionKind::kFail;
  if (t == "detect") return ActionKind::kDetect;
  fail("unknown action type '" + t + "'");
}

const char* action_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::kAbcast: return "abcast";
    case ActionKind::kAdeliver: return "adeliver";
    case ActionKind::kReceive: return "receive";
    case ActionKind::kTx: return "tx";
    case ActionKind::kFail: return "fail";
    case ActionKind::kDetect: return "detect";
  }
  return "?";
}

Action parse_action(const json& j, int n) {
  if (!j.contains("type")) fail("action missing type");
  Action a;
  a.kind = parse_action_kind(j.at("type").get<std::string>());
  int p = j.value("p", -1);
  if (p < 0 || p >= n) fail("action p out of range");
  a.p = static_cast<NodeId>(p);
  if (a.kind == ActionKind::kDetect) {
    int q = j.value("q", -1);
    if (q < 0 || q >= n) fail("detect q out of range");
    a.q = static_cast<NodeId>(q);
  }
  return a;
}

Mutation parse_mutation(const std::string& m) {
  if (m == "none") return Mutation::kNone;
  if (m == "td_include_notifier") return Mutation::kTdIncludeNotifier;
  if (m == "adeliver_ignore_tracking") return Mutation::kAdeliverIgnoreTracking;
  if (m == "drop_fail_forwarding") return Mutation::kDropFailForwarding;
  fail("unknown mutation '" + m + "'");
}

const char* mutation_name(Mutation m) {
  switch (m) {
    case Mutation::kNone: return "none";
    case Mutation::kTdIncludeNotifier: return "td_include_notifier";
    case Mutation::kAdeliverIgnoreTracking: return "adeliver_ignore_tracking";
    case Mutation::kDropFailForwarding: return "drop_fail_forwarding";
  }
  return "?";
}

json graph_to_json(const Digraph& g) {
  json j;
  j["nodes"] = g.universe();
  json edges = json::array();
  for (auto [u, v] : g.edge_list()) edges.push_back(json::array({u, v}));
  j["edges"] = edges;
  return j;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  Scenario sc;
  sc.name = j.value("name", "scenario");
  if (!j.contains("graph")) fail("missing graph");
  sc.cfg.overlay = parse_graph(j.at("graph"));
  sc.cfg.n = sc.cfg.overlay.universe();
  sc.cfg.f = j.value("f", 0);
  sc.cfg.mutation = parse_mutation(j.value("mutation", "none"));
  sc.cfg.tx_from_failed = j.value("txFromFailed", false);

  std::string mode = j.value("mode", "exhaustive");
  if (mode == "exhaustive") sc.mode = RunMode::kExhaustive;
  else if (mode == "fuzz") sc.mode = RunMode::kFuzz;
  else if (mode == "replay") sc.mode = RunMode::kReplay;
  else fail("unknown mode '" + mode + "'");

  for (const json& a : j.value("actions", json::array()))
    sc.actions.push_back(parse_action(a, sc.cfg.n));

  for (const json& as : j.value("assertions", json::array())) {
    Assertion x;
    if (as.contains("afterStep")) x.after_step = as.at("afterStep").get<int>();
    else if (as.value("atEnd", false)) x.after_step = -1;
    else fail("assertion needs afterStep or atEnd");
    if (x.after_step == 0 || x.after_step < -1 ||
        x.after_step > static_cast<int>(sc.actions.size()))
      fail("assertion afterStep out of range (1-based prefix index)");
    x.kind = as.value("kind", "");
    if (x.kind.empty()) fail("assertion missing kind");
    x.args = as.value("args", std::vector<int>{});
    if (!as.contains("expected")) fail("assertion missing expected");
    x.expected_json = as.at("expected").dump();
    sc.assertions.push_back(std::move(x));
  }

  sc.checks = j.value("checks", std::vector<std::string>{});
  sc.max_states = j.value("maxStates", sc.max_states);
  sc.n_schedules = j.value("nSchedules", sc.n_schedules);
  sc.step_cap = j.value("stepCap", sc.step_cap);
  sc.seed = j.value("seed", sc.seed);
  sc.failure_weight = j.value("failureWeight", sc.failure_weight);
  sc.drain = j.value("drain", sc.drain);
  if (sc.n_schedules < 0 || sc.step_cap <= 0 || sc.failure_weight < 0 || sc.failure_weight > 1)
    fail("bad budget field");
  validate_config(sc.cfg);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

std::string action_to_json(const Action& a) {
  json j;
  j["type"] = action_kind_name(a.kind);
  j["p"] = a.p;
  if (a.kind == ActionKind::kDetect) j["q"] = a.q;
  return j.dump();
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["graph"] = graph_to_json(sc.cfg.overlay);
  j["f"] = sc.cfg.f;
  if (sc.cfg.mutation != Mutation::kNone) j["mutation"] = mutation_name(sc.cfg.mutation);
  if (sc.cfg.tx_from_failed) j["txFromFailed"] = true;
  j["mode"] = sc.mode == RunMode::kExhaustive ? "exhaustive"
              : sc.mode == RunMode::kFuzz     ? "fuzz"
                                              : "replay";
  json actions = json::array();
  for (const Action& a : sc.actions) actions.push_back(json::parse(action_to_json(a)));
  j["actions"] = actions;
  if (!sc.assertions.empty()) {
    json as = json::array();
    for (const Assertion& x : sc.assertions) {
      json e;
      if (x.after_step < 0) e["atEnd"] = true;
      else e["afterStep"] = x.after_step;
      e["kind"] = x.kind;
      e["args"] = x.args;
      e["expected"] = json::parse(x.expected_json);
      as.push_back(e);
    }
    j["assertions"] = as;
  }
  if (!sc.checks.empty()) j["checks"] = sc.checks;
  j["maxStates"] = sc.max_states;
  j["nSchedules"] = sc.n_schedules;
  j["stepCap"] = sc.step_cap;
  j["seed"] = sc.seed;
  j["failureWeight"] = sc.failure_weight;
  j["drain"] = sc.drain;
  return j.dump(2) + "\n";
}

}  // namespace allconcur
