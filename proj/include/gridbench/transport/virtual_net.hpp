#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gridbench/common/bytes.hpp"
#include "gridbench/netem/clock.hpp"
#include "gridbench/netem/link.hpp"
#include "gridbench/transport/framing.hpp"

namespace gridbench::transport {

// Link-layer mux tag, first byte of every frame on a virtual link.
inline constexpr std::uint8_t kMuxDatagram = 1;
inline constexpr std::uint8_t kMuxStreamSeg = 2;
inline constexpr std::uint8_t kMuxStreamAck = 3;

enum class StreamSide : std::uint8_t { A = 0, B = 1 };

// Reliable in-order byte stream over a lossy link pair: fixed-size segments,
// cumulative acks, timer retransmission, a small send window. Both the
// segments and the acks ride the emulated links, so loss on either side is
// recovered below the framing layer — the application sees no loss.
class VirtualStream {
 public:
  VirtualStream(netem::VirtualClock& clock, netem::Link& a_out,
                netem::Link& b_out, std::int64_t rto_us, std::size_t mss = 1448);

  void send(StreamSide side, ByteView bytes);
  void set_on_receive(StreamSide side, std::function<void(ByteView)> fn);

  // Called by the owning net's demux with the full mux-tagged frame.
  void on_link_frame(StreamSide receiver, ByteView frame);

  std::uint64_t retransmissions() const { return retransmissions_; }

 private:
  struct Endpoint {
    netem::Link* out = nullptr;
    // Sender half (segments this endpoint originated).
    std::uint64_t next_new_seg = 0;
    std::uint64_t send_base = 0;
    std::uint64_t cursor = 0;  // next never-transmitted segment
    std::map<std::uint64_t, Bytes> unacked;  // seg -> framed bytes
    // Receiver half.
    std::uint64_t next_expected = 0;
    std::map<std::uint64_t, Bytes> out_of_order;
    std::function<void(ByteView)> on_receive;
  };

  Endpoint& end(StreamSide s) { return s == StreamSide::A ? a_ : b_; }
  void pump(StreamSide side);
  void transmit(StreamSide side, std::uint64_t seg);
  void arm_timer(StreamSide side, std::uint64_t seg);
  void handle_segment(StreamSide receiver, ByteView frame);
  void handle_ack(StreamSide receiver, ByteView frame);
  void send_ack(StreamSide receiver);

  netem::VirtualClock& clock_;
  std::int64_t rto_us_;
  std::size_t mss_;
  std::size_t window_ = 64;
  Endpoint a_;
  Endpoint b_;
  std::uint64_t retransmissions_ = 0;
};

// Star topology around one hub: each node gets an uplink and a downlink
// built from its LinkProfile. Datagram pub/sub and per-node reliable
// streams share the links through the one-byte mux tag. Single-threaded,
// driven entirely by the virtual clock.
class VirtualNet {
 public:
  using DatagramHandler =
      std::function<void(const std::string& topic, ByteView payload,
                         std::int64_t at_us)>;

  VirtualNet(netem::VirtualClock& clock, std::uint64_t seed,
             netem::TraceSink* trace = nullptr);

  void add_node(const std::string& name, const netem::LinkProfile& profile);
  bool has_node(const std::string& name) const;
  std::vector<std::string> node_names() const;

  netem::Link& up_link(const std::string& node);
  netem::Link& down_link(const std::string& node);
  std::vector<netem::Link*> up_links();

  // Fire-and-forget datagrams. "up" = node -> hub, "down" = hub -> node.
  void publish_up(const std::string& node, const std::string& topic,
                  ByteView payload);
  void publish_down(const std::string& node, const std::string& topic,
                    ByteView payload);

  void subscribe_hub(Subscription sub, DatagramHandler handler);
  void subscribe_node(const std::string& node, Subscription sub,
                      DatagramHandler handler);

  // Lazily creates the node's reliable stream (A = node side, B = hub side).
  VirtualStream& stream(const std::string& node, std::int64_t rto_us);

 private:
  struct HubSubscriber {
    Subscription sub;
    DatagramHandler handler;
  };
  struct Node {
    std::unique_ptr<netem::Link> up;
    std::unique_ptr<netem::Link> down;
    std::unique_ptr<VirtualStream> stream;
    std::vector<HubSubscriber> subscribers;  // node-side subscriptions
  };

  Node& need(const std::string& name);
  void on_up_frame(const std::string& name, Bytes frame, std::int64_t at_us);
  void on_down_frame(const std::string& name, Bytes frame, std::int64_t at_us);

  netem::VirtualClock& clock_;
  std::uint64_t seed_;
  netem::TraceSink* trace_;
  std::map<std::string, Node> nodes_;
  std::vector<HubSubscriber> hub_subscribers_;
};

}  // namespace gridbench::transport
