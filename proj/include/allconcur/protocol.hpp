#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "allconcur/digraph.hpp"
#include "allconcur/fd.hpp"
#include "allconcur/net.hpp"
#include "allconcur/trace.hpp"
#include "allconcur/tracking.hpp"
#include "allconcur/types.hpp"

namespace allconcur {

// Deliberate protocol defects used to validate checker sensitivity.
enum class Mutation : uint8_t {
  kNone = 0,
  kTdIncludeNotifier,        // expansion keeps the notifier among t's successors
  kAdeliverIgnoreTracking,   // adeliver no longer waits for empty tracking digraphs
  kDropFailForwarding,       // failure notifications are consumed, never forwarded
};

struct SystemConfig {
  int n = 0;
  int f = 0;
  Digraph overlay;
  Mutation mutation = Mutation::kNone;
  bool tx_from_failed = false;  // alternative reading: buffered sends survive failure
};

// Validates n, f against the overlay (including connectivity > f).
// Throws std::invalid_argument on violation.
void validate_config(const SystemConfig& cfg);

struct ServerState {
  NodeMask m = 0;             // owners of known messages
  FailureView f;              // f[t] = detectors whose notification of t arrived
  std::vector<Digraph> g;     // tracking digraph per owner
  bool nf = true;
  bool ab = false;
  bool done = false;
  bool operator==(const ServerState&) const = default;
};

struct SystemState {
  std::vector<ServerState> servers;
  NetState net;
  FdMatrix fd;
  uint8_t failed_count = 0;
  bool operator==(const SystemState&) const = default;
};

enum class ActionKind : uint8_t { kAbcast, kAdeliver, kReceive, kTx, kFail, kDetect };

struct Action {
  ActionKind kind = ActionKind::kAbcast;
  NodeId p = 0;
  NodeId q = 0;  // kDetect: the failed server
  bool operator==(const Action&) const = default;
  auto operator<=>(const Action&) const = default;
};

std::string action_name(const Action& a);

SystemState init(const SystemConfig& cfg);

bool action_enabled(const SystemState& s, const SystemConfig& cfg, const Action& a);

// All enabled actions in canonical order (kind, then parameters ascending).
std::vector<Action> enabled_actions(const SystemState& s, const SystemConfig& cfg);

// Applies an enabled action in place and reports the resulting event.
TraceEvent apply(SystemState& s, const SystemConfig& cfg, const Action& a);

// Canonical bytes (equal states produce equal bytes); out is overwritten.
void serialize(const SystemState& s, std::vector<uint8_t>& out);

std::pair<uint64_t, uint64_t> fingerprint(const SystemState& s);

}  // namespace allconcur
