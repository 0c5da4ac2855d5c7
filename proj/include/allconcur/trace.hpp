#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "allconcur/types.hpp"

namespace allconcur {

// One protocol step = one trace event.
struct TraceEvent {
  enum class Type : uint8_t {
    kAbcast,     // {p}
    kAdeliver,   // {p, order}
    kTx,         // {from, to, msg}
    kFail,       // {p}
    kDetect,     // {by, failed}
    kRecvBcast,  // {p, o}
    kRecvFail,   // {p, o, t}
    kDeliver,    // {at, msg} — a duplicate popped and discarded
  };
  Type type = Type::kAbcast;
  NodeId a = 0;    // p / from / by / at
  NodeId b = 0;    // to / failed
  Message msg{};   // kTx, kDeliver, kRecvBcast (o), kRecvFail (o,t)
  std::vector<NodeId> order;  // kAdeliver only
};

// Single JSONL line (keys sorted, no whitespace), newline included.
std::string trace_line(uint64_t step, const TraceEvent& ev);

}  // namespace allconcur
