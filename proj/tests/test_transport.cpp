#include <chrono>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "support/gen.hpp"

#include "gridbench/netem/clock.hpp"
#include "gridbench/transport/framing.hpp"
#include "gridbench/transport/sockets.hpp"
#include "gridbench/transport/virtual_net.hpp"

using namespace gridbench;
using namespace gridbench::transport;
using namespace std::chrono_literals;

TEST_CASE("stream framing survives arbitrary re-chunking") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<StreamFrame> sent;
    Bytes wire;
    const auto n = rng.uniform_int(1, 20);
    for (std::int64_t i = 0; i < n; ++i) {
      StreamFrame f{static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
                    testsupport::gen_bytes(rng, 300)};
      const Bytes enc = encode_stream_frame(f.kind, as_view(f.body));
      wire.insert(wire.end(), enc.begin(), enc.end());
      sent.push_back(std::move(f));
    }

    StreamFrameAssembler assembler;
    std::vector<StreamFrame> got;
    std::size_t off = 0;
    while (off < wire.size()) {
      const auto chunk = static_cast<std::size_t>(
          rng.uniform_int(1, static_cast<std::int64_t>(wire.size() - off)));
      assembler.feed(ByteView(wire.data() + off, chunk));
      off += chunk;
      for (;;) {
        auto r = assembler.next();
        REQUIRE(r.ok());
        if (!r.value().has_value()) break;
        got.push_back(std::move(*std::move(r).take()));
      }
    }
    CHECK(got == sent);
    CHECK(assembler.buffered() == 0);
  }
}

TEST_CASE("assembler poisons permanently on a framing violation") {
  StreamFrameAssembler assembler;
  // length prefix claiming a frame bigger than the hard cap
  Bytes bad{0xFF, 0xFF, 0xFF, 0xFF};
  assembler.feed(as_view(bad));
  auto r = assembler.next();
  REQUIRE(!r.ok());
  CHECK(r.error() == TransportError::MalformedFrame);

  // even valid bytes afterwards must keep failing: no resync
  const Bytes good = encode_stream_frame(3, Bytes{1, 2, 3});
  assembler.feed(as_view(good));
  auto r2 = assembler.next();
  REQUIRE(!r2.ok());
}

TEST_CASE("stream frame encoder rejects oversized bodies") {
  CHECK_THROWS_AS(encode_stream_frame(1, Bytes(kMaxStreamFrame, 0)),
                  TransportLogicError);
  CHECK_NOTHROW(encode_stream_frame(1, Bytes(1024, 0)));
}

TEST_CASE("datagram topic framing roundtrips and enforces bounds") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const std::string topic = testsupport::gen_id(rng, 100);
    const Bytes payload = testsupport::gen_bytes(rng, 800);
    auto r = decode_datagram(as_view(encode_datagram(topic, as_view(payload))));
    REQUIRE(r.ok());
    CHECK(r.value().topic == topic);
    CHECK(r.value().payload == payload);
  }
  CHECK_THROWS_AS(encode_datagram("t", Bytes(kMaxDatagram, 0)),
                  TransportLogicError);
  CHECK_THROWS_AS(encode_datagram(std::string(256, 'x'), Bytes{}),
                  TransportLogicError);
  auto r = decode_datagram(as_view(Bytes{}));
  CHECK(!r.ok());
  auto r5 = decode_datagram(as_view(Bytes{5, 'a', 'b'}));  // truncated topic
  REQUIRE(!r5.ok());
  CHECK(r5.error() == TransportError::Truncated);
}

TEST_CASE("echo probe codec carries seq, timestamp, and padding") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    EchoProbe p{rng.next_u64(), static_cast<std::int64_t>(rng.next_u64() >> 1),
                static_cast<std::uint16_t>(rng.uniform_int(0, 2000))};
    const Bytes enc = encode_probe(p);
    CHECK(enc.size() >= 18u + p.pad_bytes);
    auto r = decode_probe(as_view(enc));
    REQUIRE(r.ok());
    CHECK(r.value() == p);
  }
  auto bad = decode_probe(as_view(Bytes{1, 2, 3}));
  CHECK(!bad.ok());
}

TEST_CASE("subscriber queue filters, bounds, and drops oldest") {
  SubscriberQueue queue(Subscription{"alerts", 3});
  CHECK(!queue.offer("other", Bytes{0}));
  CHECK(queue.offer("alerts", Bytes{1}));
  CHECK(queue.offer("alerts", Bytes{2}));
  CHECK(queue.offer("alerts", Bytes{3}));
  CHECK(queue.offer("alerts", Bytes{4}));  // overflow: {1} is evicted
  CHECK(queue.dropped_local() == 1);
  CHECK(queue.poll() == Bytes{2});
  CHECK(queue.poll() == Bytes{3});
  CHECK(queue.poll() == Bytes{4});
  CHECK(!queue.poll().has_value());

  SubscriberQueue any(Subscription{"*", 4});
  CHECK(any.offer("anything", Bytes{9}));
  CHECK(any.wait_poll(10ms) == Bytes{9});
  any.close();
  CHECK(!any.wait_poll(1ms).has_value());

  CHECK_THROWS_AS(SubscriberQueue(Subscription{"t", 0}), TransportLogicError);
}

TEST_CASE("virtual net: datagrams flow up and down with link delay") {
  netem::VirtualClock clock;
  VirtualNet net(clock, 99);
  netem::LinkProfile prof;
  prof.loss_theta_db = -700.0;  // lossless
  prof.base_delay_ms = 10.0;
  net.add_node("n1", prof);
  net.add_node("n2", prof);
  CHECK(net.has_node("n1"));
  CHECK(!net.has_node("nX"));
  CHECK_THROWS_AS(net.add_node("n1", prof), TransportLogicError);

  std::vector<std::string> hub_got;
  std::int64_t hub_at = 0;
  net.subscribe_hub(Subscription{"*", 16},
                    [&](const std::string& topic, ByteView payload, std::int64_t at) {
                      hub_got.push_back(topic + "/" +
                                        std::to_string(payload.size()));
                      hub_at = at;
                    });
  std::vector<std::string> node_got;
  net.subscribe_node("n2", Subscription{"cmd", 16},
                     [&](const std::string& topic, ByteView, std::int64_t) {
                       node_got.push_back(topic);
                     });

  net.publish_up("n1", "telemetry/n1", Bytes{1, 2, 3});
  net.publish_down("n2", "cmd", Bytes{4});
  net.publish_down("n2", "ignored", Bytes{5});
  clock.run_all();

  REQUIRE(hub_got.size() == 1);
  CHECK(hub_got[0] == "telemetry/n1/3");
  CHECK(hub_at == 10000);  // instant departure + 10 ms
  CHECK(node_got == std::vector<std::string>{"cmd"});
}

TEST_CASE("virtual stream delivers in order under heavy loss") {
  netem::VirtualClock clock;
  VirtualNet net(clock, 4242);
  netem::LinkProfile prof;
  prof.sinr_db = 2.944;  // ~5% loss at k=1, theta=0
  prof.base_delay_ms = 5.0;
  prof.jitter_ms = 1.0;
  net.add_node("n1", prof);

  VirtualStream& stream = net.stream("n1", 30'000);
  Bytes received;
  stream.set_on_receive(StreamSide::B, [&](ByteView bytes) {
    received.insert(received.end(), bytes.begin(), bytes.end());
  });

  Rng rng(7);
  Bytes sent;
  for (int burst = 0; burst < 40; ++burst) {
    const Bytes chunk = testsupport::gen_bytes(rng, 5000);
    sent.insert(sent.end(), chunk.begin(), chunk.end());
    stream.send(StreamSide::A, as_view(chunk));
    clock.run_until(clock.now_us() + 20'000);
  }
  // settle: enough timer cycles for every retransmission to land
  clock.run_until(clock.now_us() + 5'000'000);

  CHECK(received == sent);
  CHECK(stream.retransmissions() > 0);
  CHECK(net.up_link("n1").dropped_channel() > 0);
}

TEST_CASE("virtual stream is symmetric: hub-to-node direction too") {
  netem::VirtualClock clock;
  VirtualNet net(clock, 5);
  netem::LinkProfile prof;
  prof.loss_theta_db = -700.0;
  prof.base_delay_ms = 1.0;
  net.add_node("n1", prof);

  VirtualStream& stream = net.stream("n1", 20'000);
  Bytes received;
  stream.set_on_receive(StreamSide::A, [&](ByteView bytes) {
    received.insert(received.end(), bytes.begin(), bytes.end());
  });
  const Bytes msg{'h', 'e', 'l', 'l', 'o'};
  stream.send(StreamSide::B, as_view(msg));
  clock.run_all();
  CHECK(received == msg);
  CHECK(stream.retransmissions() == 0);
}

TEST_CASE("loopback tcp: framed bytes cross a real socket") {
  auto listener = TcpListener::bind_loopback();
  REQUIRE(listener.ok());
  const std::uint16_t port = listener.value().port();

  std::thread server([&] {
    // CHECK only in here: a throwing assertion would escape the thread.
    auto conn = listener.value().accept(2000ms);
    CHECK(conn.ok());
    if (!conn.ok()) return;
    Bytes buf;
    StreamFrameAssembler assembler;
    int frames = 0;
    while (frames < 3) {
      buf.clear();
      auto n = conn.value().recv_some(buf, 2000ms);
      CHECK(n.ok());
      if (!n.ok() || n.value() == 0) break;
      assembler.feed(as_view(buf));
      for (;;) {
        auto f = assembler.next();
        CHECK(f.ok());
        if (!f.ok() || !f.value().has_value()) break;
        ++frames;
      }
    }
    CHECK(frames == 3);
  });

  auto client = TcpStream::connect({"127.0.0.1", port});
  REQUIRE(client.ok());
  for (int i = 0; i < 3; ++i) {
    const Bytes frame = encode_stream_frame(7, Bytes(100 + i, 0xEE));
    REQUIRE(client.value().send_all(as_view(frame)).ok());
  }
  client.value().shutdown_send();
  server.join();
}

TEST_CASE("loopback udp: datagrams carry topics both ways") {
  auto a = UdpSocket::bind_loopback();
  auto b = UdpSocket::bind_loopback();
  REQUIRE(a.ok());
  REQUIRE(b.ok());

  const Bytes out = encode_datagram("ping", Bytes{1, 2});
  REQUIRE(a.value().send_to(as_view(out), {"127.0.0.1", b.value().port()}).ok());
  auto got = b.value().recv_from(2000ms);
  REQUIRE(got.ok());
  auto dg = decode_datagram(as_view(got.value().first));
  REQUIRE(dg.ok());
  CHECK(dg.value().topic == "ping");
  CHECK(got.value().second.port == a.value().port());

  auto none = b.value().recv_from(20ms);
  REQUIRE(!none.ok());
  CHECK(none.error() == TransportError::Timeout);
}
