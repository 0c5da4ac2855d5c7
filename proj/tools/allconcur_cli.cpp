#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "allconcur/checker.hpp"
#include "allconcur/digraph.hpp"
#include "allconcur/scenario.hpp"

namespace {

using namespace allconcur;

struct CommonOpts {
  std::string file;
  std::string out;
  std::string trace;
  std::string counterexample;
  std::optional<uint64_t> seed;
  std::optional<int> schedules;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_schedules) {
  cmd->add_option("file", o.file, "scenario file (JSON)")->required();
  cmd->add_option("--out", o.out, "write the verdict JSON here instead of stdout");
  cmd->add_option("--trace", o.trace, "write a JSONL event trace here");
  cmd->add_option("--counterexample", o.counterexample,
                  "violation replay file (default <name>.counterexample.json)");
  cmd->add_option("--seed", o.seed, "override the scenario seed");
  if (with_schedules) cmd->add_option("--schedules", o.schedules, "override nSchedules");
}

int run_mode(const CommonOpts& o, RunMode mode) {
  Scenario sc = load_scenario(o.file);
  sc.mode = mode;
  if (const char* env = std::getenv("ALLCONCUR_SEED")) sc.seed = std::stoull(env);
  if (o.seed) sc.seed = *o.seed;
  if (o.schedules) sc.n_schedules = *o.schedules;

  std::ofstream trace_file;
  std::ostream* trace = nullptr;
  if (!o.trace.empty()) {
    trace_file.open(o.trace);
    if (!trace_file) throw std::runtime_error("cannot open trace file " + o.trace);
    trace = &trace_file;
  }

  Report r = run_scenario(sc, trace);

  std::string cx_file;
  if (r.violation) {
    cx_file = o.counterexample.empty() ? sc.name + ".counterexample.json" : o.counterexample;
    std::ofstream cx(cx_file);
    if (!cx) throw std::runtime_error("cannot open counterexample file " + cx_file);
    cx << scenario_to_json(counterexample_scenario(sc, *r.violation));
  }

  std::string verdict = report_to_json(r, cx_file);
  if (o.out.empty()) {
    std::cout << verdict;
  } else {
    std::ofstream out(o.out);
    if (!out) throw std::runtime_error("cannot open output file " + o.out);
    out << verdict;
  }

  if (r.status == "pass") return 0;
  if (r.status == "fail") return 1;
  return 2;  // inconclusive or scenario_error
}

int run_graph(const std::string& file, const std::string& out, bool connectivity,
              std::optional<int> fault_f) {
  Scenario sc = load_scenario(file);
  const Digraph& g = sc.cfg.overlay;

  nlohmann::json j;
  j["n"] = g.node_count();
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId v : mask_to_ids(g.nodes())) nodes.push_back(v);
  j["nodes"] = nodes;
  nlohmann::json edges = nlohmann::json::array();
  for (auto [u, v] : g.edge_list()) edges.push_back(nlohmann::json::array({u, v}));
  j["edges"] = edges;
  j["diameter"] = diameter(g);
  if (connectivity) j["connectivity"] = vertex_connectivity(g);
  if (fault_f) j["faultDiameter"] = fault_diameter(g, *fault_f);

  std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open output file " + out);
    os << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"allconcur: leaderless atomic broadcast model checker"};
  app.require_subcommand(1);

  CommonOpts check_o, fuzz_o, replay_o;
  auto* check = app.add_subcommand("check", "exhaustively explore all schedules");
  add_common(check, check_o, false);
  auto* fuzz = app.add_subcommand("fuzz", "run seeded random schedules");
  add_common(fuzz, fuzz_o, true);
  auto* replay = app.add_subcommand("replay", "replay a fixed action sequence");
  add_common(replay, replay_o, false);

  std::string graph_file, graph_out;
  bool want_conn = false;
  std::optional<int> fault_f;
  auto* graph = app.add_subcommand("graph", "inspect a scenario's overlay digraph");
  graph->add_option("file", graph_file, "scenario file (JSON)")->required();
  graph->add_option("--out", graph_out, "write the JSON report here instead of stdout");
  graph->add_flag("--connectivity", want_conn, "compute vertex connectivity");
  graph->add_option("--fault-diameter", fault_f, "compute the fault diameter for F failures");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return run_mode(check_o, RunMode::kExhaustive);
    if (fuzz->parsed()) return run_mode(fuzz_o, RunMode::kFuzz);
    if (replay->parsed()) return run_mode(replay_o, RunMode::kReplay);
    if (graph->parsed()) return run_graph(graph_file, graph_out, want_conn, fault_f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
