#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "allconcur/scenario.hpp"

namespace allconcur {

struct PropertyStat {
  uint64_t checked = 0;
  uint64_t violations = 0;
};

struct Violation {
  std::string property;
  std::string detail;
  std::vector<Action> prefix;  // action sequence from the initial state
  int schedule_index = -1;
  uint64_t schedule_seed = 0;
};

// Terminal (quiescent) state summary collected by the explorer.
struct TerminalInfo {
  std::vector<NodeMask> m;  // per server
  NodeMask done = 0;
  NodeMask live = 0;
};

struct Report {
  std::string status = "pass";  // pass | fail | inconclusive | scenario_error
  std::string detail;
  std::map<std::string, PropertyStat> properties;
  std::optional<Violation> violation;
  uint64_t states = 0;
  uint64_t transitions = 0;
  uint64_t terminals = 0;
  int max_depth = 0;
  int schedules_run = 0;
  int schedules_quiescent = 0;
  std::vector<TerminalInfo> terminal_states;  // capped; `terminals` is the true count
  bool ok() const { return status == "pass"; }
};

// Canonical property names for a mode's default check set.
std::vector<std::string> default_checks(RunMode mode);

// All known property names (for validation and docs).
std::vector<std::string> known_checks();

// BFS over all reachable states; checks every state, transition, and terminal.
// Stops at the first violation with a shortest action prefix, or reports
// `inconclusive` if max_states is exceeded.
Report explore_exhaustive(const Scenario& sc);

// Seeded random schedules; schedule i uses an independent substream of
// sc.seed. Optional JSONL trace of every schedule to `trace`.
Report fuzz_schedules(const Scenario& sc, std::ostream* trace = nullptr);

// Applies sc.actions exactly (error if an action is not enabled at its turn),
// evaluates assertions, optionally drains to quiescence, traces every step.
Report replay_scenario(const Scenario& sc, std::ostream* trace = nullptr);

// Dispatch on sc.mode.
Report run_scenario(const Scenario& sc, std::ostream* trace = nullptr);

std::string report_to_json(const Report& r, const std::string& counterexample_file = "");

// A replayable scenario reproducing a reported violation.
Scenario counterexample_scenario(const Scenario& base, const Violation& v);

}  // namespace allconcur
