#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "allconcur/protocol.hpp"

namespace allconcur {

enum class RunMode : uint8_t { kExhaustive, kFuzz, kReplay };

// A checkpoint inside a replay: evaluate `kind(args...) == expected` after the
// given 1-based prefix step, or at the end of the run (after_step = -1).
struct Assertion {
  int after_step = -1;
  std::string kind;
  std::vector<int> args;
  std::string expected_json;  // canonical (nlohmann dump) form of the expected value
};

struct Scenario {
  std::string name;
  SystemConfig cfg;
  RunMode mode = RunMode::kExhaustive;
  std::vector<Action> actions;          // replay prefix
  std::vector<Assertion> assertions;    // replay checkpoints
  std::vector<std::string> checks;      // empty = defaults for the mode
  uint64_t max_states = 10'000'000;     // exhaustive budget
  int n_schedules = 100;                // fuzz
  int step_cap = 20'000;                // fuzz / replay drain
  uint64_t seed = 1;
  double failure_weight = 0.05;
  bool drain = true;                    // replay: run on to quiescence after the prefix
};

// Throws std::runtime_error with a field-level description on malformed input.
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);

std::string scenario_to_json(const Scenario& sc);

// JSON forms of actions, used by scenarios and counterexample files.
std::string action_to_json(const Action& a);

}  // namespace allconcur
