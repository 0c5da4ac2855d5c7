#pragma once

#include <deque>
#include <vector>

#include "allconcur/digraph.hpp"
#include "allconcur/types.hpp"

namespace allconcur {

// A buffered message with its remaining destinations. Destinations are
// consumed in ascending id order, so a mask suffices.
struct SendEntry {
  Message msg;
  NodeMask dests = 0;
  bool operator==(const SendEntry&) const = default;
};

// Reliable FIFO transport state: per-server send and receive buffers.
// recvMsg is transient (popped and dispatched within one protocol step).
struct NetState {
  std::vector<std::deque<SendEntry>> send_buf;
  std::vector<std::deque<Message>> recv_buf;

  explicit NetState(int n = 0) : send_buf(static_cast<size_t>(n)), recv_buf(static_cast<size_t>(n)) {}
  bool operator==(const NetState&) const = default;
};

// Appends one SendEntry per message: destinations are p's live successors
// except the message owner; messages with no live destinations are dropped.
void send_msg(NetState& net, NodeId p, const std::vector<Message>& msgs, NodeMask nf,
              const Digraph& g);

// Transmits the head entry's lowest destination; returns (dest, message).
// Requires send_buf[p] nonempty.
std::pair<NodeId, Message> tx_msg(NetState& net, NodeId p);

// Pops and returns the head of recv_buf[p]. Requires it nonempty.
Message deliver_msg(NetState& net, NodeId p);

}  // namespace allconcur
