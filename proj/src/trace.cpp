#include "allconcur/trace.hpp"

#include <json.hpp>

namespace allconcur {

namespace {

nlohmann::json msg_json(const Message& m) {
  nlohmann::json j;
  j["kind"] = m.kind == MsgKind::BCAST ? "BCAST" : "FAIL";
  j["o"] = m.o;
  if (m.kind == MsgKind::FAIL) j["t"] = m.t;
  return j;
}

}  // namespace

std::string trace_line(uint64_t step, const TraceEvent& ev) {
  nlohmann::json j;
  j["step"] = step;
  switch (ev.type) {
    case TraceEvent::Type::kAbcast:
      j["type"] = "abcast";
      j["p"] = ev.a;
      break;
    case TraceEvent::Type::kAdeliver:
      j["type"] = "adeliver";
      j["p"] = ev.a;
      j["order"] = ev.order;
      break;
    case TraceEvent::Type::kTx:
      j["type"] = "tx";
      j["from"] = ev.a;
      j["to"] = ev.b;
      j["msg"] = msg_json(ev.msg);
      break;
    case TraceEvent::Type::kFail:
      j["type"] = "fail";
      j["p"] = ev.a;
      break;
    case TraceEvent::Type::kDetect:
      j["type"] = "detect";
      j["by"] = ev.a;
      j["failed"] = ev.b;
      break;
    case TraceEvent::Type::kRecvBcast:
      j["type"] = "recv_bcast";
      j["p"] = ev.a;
      j["o"] = ev.msg.o;
      break;
    case TraceEvent::Type::kRecvFail:
      j["type"] = "recv_fail";
      j["p"] = ev.a;
      j["o"] = ev.msg.o;
      j["t"] = ev.msg.t;
      break;
    case TraceEvent::Type::kDeliver:
      j["type"] = "deliver";
      j["at"] = ev.a;
      j["msg"] = msg_json(ev.msg);
      break;
  }
  return j.dump() + "\n";
}

}  // namespace allconcur
