#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace allconcur {

// Servers are dense ids 0..n-1; sets of servers are bitmasks, capping n at 64.
using NodeId = uint8_t;
using NodeMask = uint64_t;

constexpr int kMaxNodes = 64;

constexpr NodeMask bit(NodeId v) { return NodeMask{1} << v; }
constexpr bool has(NodeMask m, NodeId v) { return (m >> v) & 1; }
constexpr int popcount(NodeMask m) { return std::popcount(m); }
constexpr NodeId lowest(NodeMask m) { return static_cast<NodeId>(std::countr_zero(m)); }
constexpr NodeMask full_mask(int n) {
  return n >= 64 ? ~NodeMask{0} : (NodeMask{1} << n) - 1;
}

inline std::vector<NodeId> mask_to_ids(NodeMask m) {
  std::vector<NodeId> out;
  while (m) {
    NodeId v = lowest(m);
    out.push_back(v);
    m &= m - 1;
  }
  return out;
}

inline NodeMask ids_to_mask(const std::vector<NodeId>& ids) {
  NodeMask m = 0;
  for (NodeId v : ids) m |= bit(v);
  return m;
}

enum class MsgKind : uint8_t { BCAST = 0, FAIL = 1 };

// o: owner (first sender); t: target of a failure notification (FAIL only).
struct Message {
  MsgKind kind = MsgKind::BCAST;
  NodeId o = 0;
  NodeId t = 0;  // kept 0 for BCAST so equal messages have equal bytes

  static Message bcast(NodeId owner) { return {MsgKind::BCAST, owner, 0}; }
  static Message fail(NodeId owner, NodeId target) {
    return {MsgKind::FAIL, owner, target};
  }
  bool operator==(const Message&) const = default;
};

}  // namespace allconcur
