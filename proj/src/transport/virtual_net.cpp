#include "gridbench/transport/virtual_net.hpp"

#include <algorithm>

#include "gridbench/common/rng.hpp"
#include "gridbench/iec/messages.hpp"

namespace gridbench::transport {

// ---------------------------------------------------------------- stream --

VirtualStream::VirtualStream(netem::VirtualClock& clock, netem::Link& a_out,
                             netem::Link& b_out, std::int64_t rto_us,
                             std::size_t mss)
    : clock_(clock), rto_us_(rto_us), mss_(mss) {
  a_.out = &a_out;
  b_.out = &b_out;
}

void VirtualStream::set_on_receive(StreamSide side,
                                   std::function<void(ByteView)> fn) {
  end(side).on_receive = std::move(fn);
}

void VirtualStream::send(StreamSide side, ByteView bytes) {
  Endpoint& ep = end(side);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t n = std::min(mss_, bytes.size() - off);
    ByteWriter w;
    w.u8(kMuxStreamSeg);
    w.u64(ep.next_new_seg);
    w.raw(bytes.subspan(off, n));
    ep.unacked.emplace(ep.next_new_seg, std::move(w).take());
    ++ep.next_new_seg;
    off += n;
  }
  pump(side);
}

void VirtualStream::pump(StreamSide side) {
  Endpoint& ep = end(side);
  while (ep.cursor < ep.next_new_seg && ep.cursor - ep.send_base < window_) {
    transmit(side, ep.cursor);
    ++ep.cursor;
  }
}

void VirtualStream::transmit(StreamSide side, std::uint64_t seg) {
  Endpoint& ep = end(side);
  const auto it = ep.unacked.find(seg);
  if (it == ep.unacked.end()) return;
  ep.out->send(it->second);
  arm_timer(side, seg);
}

void VirtualStream::arm_timer(StreamSide side, std::uint64_t seg) {
  clock_.schedule(clock_.now_us() + rto_us_, [this, side, seg] {
    Endpoint& ep = end(side);
    const auto it = ep.unacked.find(seg);
    if (it == ep.unacked.end()) return;  // acked meanwhile
    ++retransmissions_;
    ep.out->send(it->second);
    arm_timer(side, seg);
  });
}

void VirtualStream::on_link_frame(StreamSide receiver, ByteView frame) {
  if (frame.empty()) return;
  if (frame[0] == kMuxStreamSeg) {
    handle_segment(receiver, frame);
  } else if (frame[0] == kMuxStreamAck) {
    handle_ack(receiver, frame);
  }
}

void VirtualStream::handle_segment(StreamSide receiver, ByteView frame) {
  ByteReader r(frame);
  r.skip(1);
  const std::uint64_t seg = r.u64();
  if (!r.ok()) return;
  const Bytes payload = r.raw(r.remaining());

  Endpoint& ep = end(receiver);
  if (seg >= ep.next_expected) ep.out_of_order.emplace(seg, payload);
  while (true) {
    const auto it = ep.out_of_order.find(ep.next_expected);
    if (it == ep.out_of_order.end()) break;
    if (ep.on_receive) ep.on_receive(as_view(it->second));
    ep.out_of_order.erase(it);
    ++ep.next_expected;
  }
  // Cumulative ack; also re-acks stale retransmissions so the peer resolves.
  send_ack(receiver);
}

void VirtualStream::send_ack(StreamSide receiver) {
  Endpoint& ep = end(receiver);
  ByteWriter w;
  w.u8(kMuxStreamAck);
  w.u64(ep.next_expected);
  ep.out->send(std::move(w).take());
}

void VirtualStream::handle_ack(StreamSide receiver, ByteView frame) {
  ByteReader r(frame);
  r.skip(1);
  const std::uint64_t cum = r.u64();
  if (!r.ok()) return;
  Endpoint& ep = end(receiver);
  while (!ep.unacked.empty() && ep.unacked.begin()->first < cum)
    ep.unacked.erase(ep.unacked.begin());
  if (cum > ep.send_base) {
    ep.send_base = cum;
    pump(receiver);
  }
}

// ------------------------------------------------------------------- net --

VirtualNet::VirtualNet(netem::VirtualClock& clock, std::uint64_t seed,
                       netem::TraceSink* trace)
    : clock_(clock), seed_(seed), trace_(trace) {}

void VirtualNet::add_node(const std::string& name,
                          const netem::LinkProfile& profile) {
  if (nodes_.count(name))
    throw TransportLogicError(TransportError::BadSubscription,
                              "node already exists: " + name);
  Node node;
  node.up = std::make_unique<netem::Link>(
      clock_, name + ".up", profile, profile.rate_up_bps,
      derive_seed(seed_, {fnv1a64(name), 1}), trace_);
  node.down = std::make_unique<netem::Link>(
      clock_, name + ".down", profile, profile.rate_down_bps,
      derive_seed(seed_, {fnv1a64(name), 2}), trace_);
  netem::Link* up = node.up.get();
  netem::Link* down = node.down.get();
  nodes_.emplace(name, std::move(node));
  up->set_deliver([this, name](Bytes frame, std::int64_t at_us) {
    on_up_frame(name, std::move(frame), at_us);
  });
  down->set_deliver([this, name](Bytes frame, std::int64_t at_us) {
    on_down_frame(name, std::move(frame), at_us);
  });
}

bool VirtualNet::has_node(const std::string& name) const {
  return nodes_.count(name) != 0;
}

std::vector<std::string> VirtualNet::node_names() const {
  std::vector<std::string> names;
  names.reserve(nodes_.size());
  for (const auto& [name, _] : nodes_) names.push_back(name);
  return names;
}

VirtualNet::Node& VirtualNet::need(const std::string& name) {
  const auto it = nodes_.find(name);
  if (it == nodes_.end())
    throw TransportLogicError(TransportError::BadSubscription,
                              "unknown node: " + name);
  return it->second;
}

netem::Link& VirtualNet::up_link(const std::string& node) {
  return *need(node).up;
}
netem::Link& VirtualNet::down_link(const std::string& node) {
  return *need(node).down;
}

std::vector<netem::Link*> VirtualNet::up_links() {
  std::vector<netem::Link*> links;
  links.reserve(nodes_.size());
  for (auto& [_, node] : nodes_) links.push_back(node.up.get());
  return links;
}

void VirtualNet::publish_up(const std::string& node, const std::string& topic,
                            ByteView payload) {
  ByteWriter w;
  w.u8(kMuxDatagram);
  w.raw(as_view(encode_datagram(topic, payload)));
  need(node).up->send(std::move(w).take());
}

void VirtualNet::publish_down(const std::string& node, const std::string& topic,
                              ByteView payload) {
  ByteWriter w;
  w.u8(kMuxDatagram);
  w.raw(as_view(encode_datagram(topic, payload)));
  need(node).down->send(std::move(w).take());
}

void VirtualNet::subscribe_hub(Subscription sub, DatagramHandler handler) {
  hub_subscribers_.push_back(HubSubscriber{std::move(sub), std::move(handler)});
}

void VirtualNet::subscribe_node(const std::string& node, Subscription sub,
                                DatagramHandler handler) {
  need(node).subscribers.push_back(
      HubSubscriber{std::move(sub), std::move(handler)});
}

VirtualStream& VirtualNet::stream(const std::string& node, std::int64_t rto_us) {
  Node& n = need(node);
  if (!n.stream)
    n.stream = std::make_unique<VirtualStream>(clock_, *n.up, *n.down, rto_us);
  return *n.stream;
}

void VirtualNet::on_up_frame(const std::string& name, Bytes frame,
                             std::int64_t at_us) {
  if (frame.empty()) return;
  if (frame[0] == kMuxDatagram) {
    auto dg = decode_datagram(ByteView(frame.data() + 1, frame.size() - 1));
    if (!dg.ok()) return;  // corrupt frames cannot occur; drop defensively
    for (HubSubscriber& s : hub_subscribers_)
      if (iec::topic_match(s.sub.topic_pattern, dg.value().topic))
        s.handler(dg.value().topic, as_view(dg.value().payload), at_us);
    return;
  }
  Node& node = need(name);
  if (node.stream) node.stream->on_link_frame(StreamSide::B, as_view(frame));
}

void VirtualNet::on_down_frame(const std::string& name, Bytes frame,
                               std::int64_t at_us) {
  if (frame.empty()) return;
  Node& node = need(name);
  if (frame[0] == kMuxDatagram) {
    auto dg = decode_datagram(ByteView(frame.data() + 1, frame.size() - 1));
    if (!dg.ok()) return;
    for (HubSubscriber& s : node.subscribers)
      if (iec::topic_match(s.sub.topic_pattern, dg.value().topic))
        s.handler(dg.value().topic, as_view(dg.value().payload), at_us);
    return;
  }
  if (node.stream) node.stream->on_link_frame(StreamSide::A, as_view(frame));
}

}  // namespace gridbench::transport
