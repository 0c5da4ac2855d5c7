#include "allconcur/net.hpp"

#include <cassert>

namespace allconcur {

void send_msg(NetState& net, NodeId p, const std::vector<Message>& msgs, NodeMask nf,
              const Digraph& g) {
  for (const Message& m : msgs) {
    NodeMask dests = successors(g, p) & ~bit(m.o) & nf;
    if (dests) net.send_buf[p].push_back({m, dests});
  }
}

std::pair<NodeId, Message> tx_msg(NetState& net, NodeId p) {
  assert(!net.send_buf[p].empty());
  SendEntry& e = net.send_buf[p].front();
  NodeId q = lowest(e.dests);
  Message m = e.msg;
  e.dests &= e.dests - 1;
  if (e.dests == 0) net.send_buf[p].pop_front();
  net.recv_buf[q].push_back(m);
  return {q, m};
}

Message deliver_msg(NetState& net, NodeId p) {
  assert(!net.recv_buf[p].empty());
  Message m = net.recv_buf[p].front();
  net.recv_buf[p].pop_front();
  return m;
}

}  // namespace allconcur
