#pragma once

#include <vector>

#include "allconcur/types.hpp"

namespace allconcur {

// Perfect failure detector state: detected[p] is the set of servers whose
// failure p has locally detected. Detection is a nondeterministic step
// (see protocol's DetectFail); the notification lands in p's own receive
// buffer so it is ordered after everything p's predecessor sent earlier.
struct FdMatrix {
  std::vector<NodeMask> detected;

  explicit FdMatrix(int n = 0) : detected(static_cast<size_t>(n), 0) {}
  bool has_detected(NodeId p, NodeId q) const { return has(detected[p], q); }
  void mark(NodeId p, NodeId q) { detected[p] |= bit(q); }
  bool operator==(const FdMatrix&) const = default;
};

}  // namespace allconcur
