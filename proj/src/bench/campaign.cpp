#include "gridbench/bench/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <tuple>

#include "gridbench/common/rng.hpp"
#include "gridbench/common/wire.hpp"
#include "gridbench/measure/tables.hpp"
#include "gridbench/netem/clock.hpp"
#include "gridbench/radio/model.hpp"
#include "gridbench/telemetry/codec.hpp"
#include "gridbench/telemetry/generator.hpp"
#include "gridbench/telemetry/plan.hpp"
#include "gridbench/transport/framing.hpp"
#include "gridbench/transport/sockets.hpp"
#include "gridbench/transport/virtual_net.hpp"

namespace gridbench::bench {
namespace {

// Idle gap between schedule segments; covers queue drain plus path delay
// for every profile the harness targets (documented in docs/config.md).
constexpr std::int64_t kSegmentGapUs = 2'000'000;

std::int64_t stream_rto_us(const netem::LinkProfile& p) {
  return std::llround((2.0 * (p.base_delay_ms + p.jitter_ms) + 200.0) * 1000.0);
}

std::vector<measure::TransportRole> active_roles(TransportChoice t) {
  switch (t) {
    case TransportChoice::Tcp: return {measure::TransportRole::Stream};
    case TransportChoice::Udp: return {measure::TransportRole::Datagram};
    case TransportChoice::Both:
      return {measure::TransportRole::Stream, measure::TransportRole::Datagram};
  }
  return {};
}

struct FlowRuntime {
  const NodeConfig* node;
  telemetry::FlowSpec spec;
  measure::TransportRole role;
  measure::FlowLedger ledger;
  std::uint64_t next_seq = 0;
};

using FlowKey = std::tuple<std::uint8_t, telemetry::MessageClass,
                           measure::TransportRole>;

FlowKey flow_key(std::uint8_t source, telemetry::MessageClass cls,
                 measure::TransportRole role) {
  return {source, cls, role};
}

// Report order: node (config order) x role (stream first) x class.
std::vector<FlowRuntime> make_flows(const CampaignConfig& cfg) {
  std::vector<FlowRuntime> flows;
  if (!cfg.phase_app) return flows;
  const telemetry::MessagePlan plan = telemetry::build_plan(cfg.plan);
  for (const NodeConfig& node : cfg.nodes) {
    if (node.is_hub || node.source_id == 0) continue;
    for (measure::TransportRole role : active_roles(cfg.transport)) {
      for (const telemetry::FlowSpec& spec : plan.flows) {
        if (spec.source_id != node.source_id) continue;
        measure::FlowId id{spec.source_id, spec.message_class, role};
        flows.push_back(
            FlowRuntime{&node, spec, role, measure::FlowLedger(id), 0});
      }
    }
  }
  return flows;
}

// Throughput windows shrink for sub-second runs so a summary always has at
// least one complete window.
std::int64_t tput_window_us(double duration_s) {
  return std::min<std::int64_t>(1'000'000, std::llround(duration_s * 1e6));
}

void check_thresholds(CampaignReport& r) {
  const Thresholds& th = r.config.thresholds;
  for (const measure::FlowLedger& led : r.ledgers) {
    if (led.tx_count() == 0) continue;
    const double loss_pct = led.loss_rate() * 100.0;
    const bool stream = led.id().role == measure::TransportRole::Stream;
    const std::optional<double>& bound =
        stream ? th.stream_loss_max_pct : th.datagram_loss_max_pct;
    if (bound && loss_pct > *bound)
      r.violations.push_back(measure::flow_id_label(led.id()) + " loss " +
                             measure::format_loss_cell(led.loss_rate()) +
                             " exceeds " + std::to_string(*bound) + "%");
  }
  if (th.rtt_avg_min_ms || th.rtt_avg_max_ms) {
    for (const RttRow& row : r.rtt) {
      if (row.stats.answered() == 0) {
        r.violations.push_back(row.node + " rtt: all probes lost");
        continue;
      }
      const double avg_ms = row.stats.summary().avg_us / 1000.0;
      if (th.rtt_avg_min_ms && avg_ms < *th.rtt_avg_min_ms)
        r.violations.push_back(row.node + " rtt avg " + std::to_string(avg_ms) +
                               " ms below " + std::to_string(*th.rtt_avg_min_ms));
      if (th.rtt_avg_max_ms && avg_ms > *th.rtt_avg_max_ms)
        r.violations.push_back(row.node + " rtt avg " + std::to_string(avg_ms) +
                               " ms above " + std::to_string(*th.rtt_avg_max_ms));
    }
  }
  if (th.throughput_min_fraction) {
    for (const ThroughputRow& row : r.throughput) {
      try {
        const auto s = row.series.summary();
        if (s.avg_bps < *th.throughput_min_fraction * row.shaped_rate_bps)
          r.violations.push_back(
              row.node + " " + direction_name(row.direction) + " throughput " +
              std::to_string(s.avg_bps) + " bps below " +
              std::to_string(*th.throughput_min_fraction) + " of link rate");
      } catch (const measure::ThroughputError&) {
        r.violations.push_back(row.node + " " + direction_name(row.direction) +
                               " throughput: no complete window");
      }
    }
  }
}

// ======================================================================
// Virtual backend: one clock, every node on emulated links.
// ======================================================================

class VirtualRunner {
 public:
  VirtualRunner(const CampaignConfig& cfg, CampaignReport& report)
      : cfg_(cfg),
        report_(report),
        net_(clock_, cfg.seed, cfg.trace ? &report.trace : nullptr) {
    for (const NodeConfig& node : cfg.nodes)
      if (!node.is_hub) net_.add_node(node.name, node.profile);
    flows_ = make_flows(cfg_);
    for (FlowRuntime& f : flows_)
      flow_index_[flow_key(f.spec.source_id, f.spec.message_class, f.role)] = &f;

    net_.subscribe_hub({"*", 1}, [this](const std::string& topic,
                                        ByteView payload, std::int64_t at) {
      on_hub_datagram(topic, payload, at);
    });
    for (const NodeConfig& node : cfg.nodes) {
      if (node.is_hub) continue;
      const std::string name = node.name;
      net_.subscribe_node(name, {"*", 1},
                          [this, name](const std::string& topic,
                                       ByteView payload, std::int64_t at) {
                            on_node_datagram(name, topic, payload, at);
                          });
    }
    for (FlowRuntime& f : flows_) {
      if (f.role != measure::TransportRole::Stream) continue;
      const std::string name = f.node->name;
      if (!stream_nodes_.insert(name).second) continue;
      auto& stream = net_.stream(name, stream_rto_us(f.node->profile));
      stream.set_on_receive(
          transport::StreamSide::B,
          [this, name](ByteView bytes) { on_stream_bytes(name, bytes); });
    }
  }

  void run() {
    std::int64_t t = 0;
    if (cfg_.phase_throughput) t = phase_throughput(t);
    if (cfg_.phase_echo) t = phase_echo(t);
    if (cfg_.phase_app) t = phase_app(t);
    clock_.run_until(t);
    report_.virtual_end_us = clock_.now_us();
    for (FlowRuntime& f : flows_)
      report_.ledgers.push_back(std::move(f.ledger));
  }

 private:
  // ---- throughput phase ----

  std::int64_t phase_throughput(std::int64_t t) {
    std::vector<Direction> dirs;
    if (cfg_.throughput.directions != Direction::Down)
      dirs.push_back(Direction::Up);
    if (cfg_.throughput.directions != Direction::Up)
      dirs.push_back(Direction::Down);
    const std::int64_t duration = std::llround(cfg_.throughput.duration_s * 1e6);
    const auto cpes = cpe_nodes(cfg_);
    if (cfg_.scenario == Scenario::Isolated) {
      for (const NodeConfig* node : cpes)
        for (Direction d : dirs) t = tput_segment({node}, d, t, duration);
    } else {
      for (Direction d : dirs) t = tput_segment(cpes, d, t, duration);
    }
    return t;
  }

  std::int64_t tput_segment(const std::vector<const NodeConfig*>& nodes,
                            Direction dir, std::int64_t start,
                            std::int64_t duration) {
    const std::int64_t end = start + duration;
    const bool up = dir == Direction::Up;
    const Bytes payload(cfg_.throughput.datagram_bytes, 0xA5);

    std::vector<netem::Link*> up_links;
    for (const NodeConfig* n : nodes) up_links.push_back(&net_.up_link(n->name));
    if (cfg_.cell_pool_up_bps > 0 && up)
      netem::apply_cell_pool(up_links, cfg_.cell_pool_up_bps);

    struct Seg {
      const NodeConfig* node;
      std::unique_ptr<measure::ThroughputSeries> series;
      double rate;
    };
    std::vector<Seg> segs;
    for (const NodeConfig* n : nodes) {
      netem::Link& link =
          up ? net_.up_link(n->name) : net_.down_link(n->name);
      auto series = std::make_unique<measure::ThroughputSeries>(
          start, tput_window_us(cfg_.throughput.duration_s));
      (up ? up_series_ : down_series_)[n->name] = series.get();
      const std::string name = n->name;
      auto send_one = [this, name, up, payload] {
        if (up)
          net_.publish_up(name, "tput/up/" + name, as_view(payload));
        else
          net_.publish_down(name, "tput/down", as_view(payload));
      };
      link.set_on_departure([end, send_one](std::int64_t at) {
        if (at < end) send_one();
      });
      clock_.schedule(start, [send_one] {
        for (int i = 0; i < 4; ++i) send_one();
      });
      segs.push_back(Seg{n, std::move(series), link.effective_rate_bps()});
    }

    clock_.run_until(end + kSegmentGapUs);

    for (Seg& s : segs) {
      netem::Link& link =
          up ? net_.up_link(s.node->name) : net_.down_link(s.node->name);
      link.set_on_departure({});
      (up ? up_series_ : down_series_).erase(s.node->name);
      s.series->seal(end);
      report_.throughput.push_back(
          ThroughputRow{s.node->name, dir, s.rate, std::move(*s.series)});
    }
    for (netem::Link* l : up_links) l->clear_rate_override();
    return end + kSegmentGapUs;
  }

  // ---- echo phase ----

  std::int64_t phase_echo(std::int64_t t) {
    const auto cpes = cpe_nodes(cfg_);
    if (cfg_.scenario == Scenario::Isolated) {
      for (const NodeConfig* node : cpes) t = echo_segment({node}, t);
      return t;
    }
    return echo_segment(cpes, t);
  }

  std::int64_t echo_segment(const std::vector<const NodeConfig*>& nodes,
                            std::int64_t start) {
    const std::int64_t interval = std::llround(cfg_.probe.interval_ms * 1000.0);
    const std::int64_t timeout = std::llround(cfg_.probe.timeout_ms * 1000.0);
    const std::int64_t end =
        start + static_cast<std::int64_t>(cfg_.probe.count) * interval + timeout;

    std::vector<netem::Link*> up_links;
    for (const NodeConfig* n : nodes) up_links.push_back(&net_.up_link(n->name));
    if (cfg_.cell_pool_up_bps > 0)
      netem::apply_cell_pool(up_links, cfg_.cell_pool_up_bps);

    for (const NodeConfig* n : nodes) {
      const std::string name = n->name;
      echo_[name] = std::make_unique<EchoState>();
      for (std::uint64_t i = 0; i < cfg_.probe.count; ++i) {
        clock_.schedule(start + static_cast<std::int64_t>(i) * interval,
                        [this, name, i] {
                          transport::EchoProbe probe{i, clock_.now_us(),
                                                     cfg_.probe.pad_bytes};
                          echo_[name]->outstanding.insert(i);
                          net_.publish_down(
                              name, "echo/" + name,
                              as_view(transport::encode_probe(probe)));
                        });
      }
    }
    clock_.run_until(end);
    for (const NodeConfig* n : nodes) {
      EchoState& es = *echo_[n->name];
      for (std::uint64_t seq : es.outstanding) es.stats.add_timeout(seq);
      report_.rtt.push_back(RttRow{n->name, std::move(es.stats)});
      echo_.erase(n->name);
    }
    for (netem::Link* l : up_links) l->clear_rate_override();
    return end + kSegmentGapUs;
  }

  // ---- application phase ----

  std::int64_t phase_app(std::int64_t t) {
    const std::int64_t duration = std::llround(cfg_.app_duration_s * 1e6);
    if (cfg_.scenario == Scenario::Isolated) {
      for (const NodeConfig& node : cfg_.nodes) {
        if (node.is_hub || node.source_id == 0) continue;
        t = app_segment(&node, t, duration);
      }
      return t;
    }
    return app_segment(nullptr, t, duration);
  }

  // `only` restricts the segment to one node (isolated); null runs them all.
  std::int64_t app_segment(const NodeConfig* only, std::int64_t start,
                           std::int64_t duration) {
    std::vector<netem::Link*> up_links;
    std::set<std::string> active;
    for (FlowRuntime& f : flows_) {
      if (only && f.node != only) continue;
      if (active.insert(f.node->name).second)
        up_links.push_back(&net_.up_link(f.node->name));
    }
    if (cfg_.cell_pool_up_bps > 0)
      netem::apply_cell_pool(up_links, cfg_.cell_pool_up_bps);

    std::int64_t max_rto = 0;
    for (FlowRuntime& f : flows_) {
      if (only && f.node != only) continue;
      if (f.role == measure::TransportRole::Stream)
        max_rto = std::max(max_rto, stream_rto_us(f.node->profile));
      Rng jitter_rng(derive_seed(
          cfg_.seed, {fnv1a64("plan-jitter"), f.spec.source_id,
                      static_cast<std::uint64_t>(f.spec.message_class),
                      static_cast<std::uint64_t>(f.role)}));
      for (std::int64_t tk : telemetry::emission_times(f.spec, duration)) {
        std::int64_t at = start + tk;
        if (f.spec.jitter_us > 0) {
          const std::int64_t j = f.spec.jitter_us;
          at = start + std::max<std::int64_t>(0, tk + jitter_rng.uniform_int(-j, j));
        }
        FlowRuntime* fr = &f;
        clock_.schedule(at, [this, fr] { emit(*fr); });
      }
    }
    const std::int64_t settle =
        max_rto > 0 ? 20 * max_rto + 1'000'000 : kSegmentGapUs;
    const std::int64_t end = start + duration;
    clock_.run_until(end + settle);
    for (netem::Link* l : up_links) l->clear_rate_override();
    return end + settle;
  }

  void emit(FlowRuntime& f) {
    const std::int64_t now = clock_.now_us();
    const telemetry::TelemetryRecord record =
        telemetry::generate_record(f.spec.kind, f.spec.source_id, now, cfg_.seed);
    const telemetry::TelemetryEnvelope env =
        telemetry::make_envelope(f.spec.source_id, f.spec.message_class,
                                 f.next_seq++, now,
                                 telemetry::serialize_record(record));
    f.ledger.record_tx(env);
    const Bytes bytes = telemetry::encode_envelope(env);
    if (f.role == measure::TransportRole::Datagram) {
      net_.publish_up(f.node->name, "telemetry/" + f.node->name, as_view(bytes));
    } else {
      net_.stream(f.node->name, stream_rto_us(f.node->profile))
          .send(transport::StreamSide::A,
                as_view(transport::encode_stream_frame(
                    static_cast<std::uint8_t>(FrameKind::Telemetry),
                    as_view(bytes))));
    }
  }

  // ---- demux ----

  void on_hub_datagram(const std::string& topic, ByteView payload,
                       std::int64_t at) {
    if (topic.starts_with("tput/up/")) {
      const auto it = up_series_.find(topic.substr(8));
      if (it != up_series_.end())
        it->second->add(at, payload.size() + topic.size() + 2);
      return;
    }
    if (topic.starts_with("echo-reply/")) {
      const auto it = echo_.find(topic.substr(11));
      if (it == echo_.end()) return;  // reply after the segment sealed
      auto probe = transport::decode_probe(payload);
      if (!probe) return;
      EchoState& es = *it->second;
      if (es.outstanding.erase(probe.value().probe_seq) == 0) return;
      es.stats.add_sample(probe.value().probe_seq,
                          at - probe.value().sent_at_us);
      return;
    }
    if (topic.starts_with("telemetry/")) {
      auto env = telemetry::decode_envelope(payload);
      if (!env) {
        report_.flow_errors.push_back(
            std::string("undecodable telemetry datagram: ") +
            telemetry::schema_error_name(env.error()));
        return;
      }
      record_rx(env.value(), measure::TransportRole::Datagram);
    }
  }

  void on_node_datagram(const std::string& name, const std::string& topic,
                        ByteView payload, std::int64_t at) {
    if (topic == "tput/down") {
      const auto it = down_series_.find(name);
      if (it != down_series_.end())
        it->second->add(at, payload.size() + topic.size() + 2);
      return;
    }
    if (topic == "echo/" + name)
      net_.publish_up(name, "echo-reply/" + name, payload);
  }

  void on_stream_bytes(const std::string& node, ByteView bytes) {
    transport::StreamFrameAssembler& assembler = assemblers_[node];
    assembler.feed(bytes);
    while (true) {
      auto frame = assembler.next();
      if (!frame) {
        report_.flow_errors.push_back("stream framing violation from " + node);
        return;
      }
      if (!frame.value()) return;
      const transport::StreamFrame& f = *frame.value();
      if (f.kind != static_cast<std::uint8_t>(FrameKind::Telemetry)) continue;
      auto env = telemetry::decode_envelope(as_view(f.body));
      if (!env) {
        report_.flow_errors.push_back(
            std::string("undecodable stream envelope from ") + node + ": " +
            telemetry::schema_error_name(env.error()));
        continue;
      }
      record_rx(env.value(), measure::TransportRole::Stream);
    }
  }

  void record_rx(const telemetry::TelemetryEnvelope& env,
                 measure::TransportRole role) {
    const auto it =
        flow_index_.find(flow_key(env.source_id, env.message_class, role));
    if (it == flow_index_.end()) {
      report_.flow_errors.push_back("envelope for unconfigured flow source " +
                                    std::to_string(env.source_id));
      return;
    }
    it->second->ledger.record_rx(env);
  }

  struct EchoState {
    measure::RttStats stats;
    std::set<std::uint64_t> outstanding;
  };

  const CampaignConfig& cfg_;
  CampaignReport& report_;
  netem::VirtualClock clock_;
  transport::VirtualNet net_;
  std::vector<FlowRuntime> flows_;
  std::map<FlowKey, FlowRuntime*> flow_index_;
  std::set<std::string> stream_nodes_;
  std::map<std::string, transport::StreamFrameAssembler> assemblers_;
  std::map<std::string, measure::ThroughputSeries*> up_series_;
  std::map<std::string, measure::ThroughputSeries*> down_series_;
  std::map<std::string, std::unique_ptr<EchoState>> echo_;
};

// ======================================================================
// Sockets backend: loopback UDP/TCP, steady-clock pacing, hub rx thread.
// Report rows match the virtual layout; determinism is not promised here.
// ======================================================================

class SocketsRunner {
 public:
  SocketsRunner(const CampaignConfig& cfg, CampaignReport& report)
      : cfg_(cfg), report_(report), t0_(std::chrono::steady_clock::now()) {
    auto udp = transport::UdpSocket::bind_loopback();
    if (!udp)
      throw CampaignRunError(CampaignError::BackendUnavailable,
                             "hub udp bind failed: " + udp.error_detail());
    hub_udp_ = std::make_unique<transport::UdpSocket>(std::move(udp).take());
    flows_ = make_flows(cfg_);
    for (FlowRuntime& f : flows_)
      flow_index_[flow_key(f.spec.source_id, f.spec.message_class, f.role)] = &f;
  }

  void run() {
    std::thread rx([this] { hub_rx_loop(); });
    if (cfg_.phase_throughput) phase_throughput();
    if (cfg_.phase_echo) phase_echo();
    if (cfg_.phase_app) phase_app();
    stop_ = true;
    rx.join();
    report_.virtual_end_us = 0;
    for (FlowRuntime& f : flows_) report_.ledgers.push_back(std::move(f.ledger));
  }

 private:
  using SteadyClock = std::chrono::steady_clock;

  std::int64_t now_us() const {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               SteadyClock::now() - t0_)
        .count();
  }
  SteadyClock::time_point at_us(std::int64_t t) const {
    return t0_ + std::chrono::microseconds(t);
  }

  transport::SocketAddress hub_addr() const {
    return {"127.0.0.1", hub_udp_->port()};
  }

  // The single hub-side UDP reader; routes every phase's traffic.
  void hub_rx_loop() {
    while (!stop_) {
      auto got = hub_udp_->recv_from(std::chrono::milliseconds(20));
      if (!got) continue;  // timeout or transient error
      const Bytes& frame = got.value().first;
      auto dg = transport::decode_datagram(as_view(frame));
      if (!dg) continue;
      const std::string& topic = dg.value().topic;
      const std::int64_t at = now_us();
      std::lock_guard<std::mutex> lock(mu_);
      if (topic.starts_with("hello/")) {
        node_addr_[topic.substr(6)] = got.value().second;
      } else if (topic.starts_with("tput/up/")) {
        const auto it = up_series_.find(topic.substr(8));
        if (it != up_series_.end()) it->second->add(at, frame.size());
      } else if (topic.starts_with("echo-reply/")) {
        const auto it = echo_.find(topic.substr(11));
        if (it == echo_.end()) continue;
        auto probe = transport::decode_probe(as_view(dg.value().payload));
        if (!probe) continue;
        if (it->second->outstanding.erase(probe.value().probe_seq) == 0)
          continue;
        it->second->stats.add_sample(probe.value().probe_seq,
                                     at - probe.value().sent_at_us);
      } else if (topic.starts_with("telemetry/")) {
        auto env = telemetry::decode_envelope(as_view(dg.value().payload));
        if (!env) continue;
        const auto it = flow_index_.find(flow_key(env.value().source_id,
                                                  env.value().message_class,
                                                  measure::TransportRole::Datagram));
        if (it != flow_index_.end()) it->second->ledger.record_rx(env.value());
      }
    }
  }

  std::optional<transport::SocketAddress> wait_node_addr(
      const std::string& name) {
    for (int i = 0; i < 200; ++i) {
      {
        std::lock_guard<std::mutex> lock(mu_);
        const auto it = node_addr_.find(name);
        if (it != node_addr_.end()) return it->second;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    return std::nullopt;
  }

  // Paced datagram blast at `rate_bps` toward `to`, starting immediately.
  static void blast(transport::UdpSocket& sock,
                    const transport::SocketAddress& to,
                    const std::string& topic, std::size_t payload_bytes,
                    double rate_bps, std::chrono::microseconds duration) {
    const Bytes frame = transport::encode_datagram(
        topic, Bytes(payload_bytes, 0xA5));
    const auto start = SteadyClock::now();
    const auto end = start + duration;
    double sent_bytes = 0;
    while (SteadyClock::now() < end) {
      const double elapsed_s =
          std::chrono::duration<double>(SteadyClock::now() - start).count();
      const double due = rate_bps * elapsed_s / 8.0;
      bool any = false;
      while (sent_bytes < due && SteadyClock::now() < end) {
        (void)sock.send_to(as_view(frame), to);
        sent_bytes += static_cast<double>(frame.size());
        any = true;
      }
      if (!any) std::this_thread::sleep_for(std::chrono::microseconds(500));
    }
  }

  void phase_throughput() {
    std::vector<Direction> dirs;
    if (cfg_.throughput.directions != Direction::Down)
      dirs.push_back(Direction::Up);
    if (cfg_.throughput.directions != Direction::Up)
      dirs.push_back(Direction::Down);
    const auto cpes = cpe_nodes(cfg_);
    const auto run_set = [&](const std::vector<const NodeConfig*>& nodes,
                             Direction d) {
      std::vector<std::thread> workers;
      std::vector<std::unique_ptr<measure::ThroughputSeries>> own(nodes.size());
      const std::int64_t start = now_us();
      const auto duration = std::chrono::microseconds(
          std::llround(cfg_.throughput.duration_s * 1e6));
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const NodeConfig* n = nodes[i];
        if (d == Direction::Up) {
          auto series =
              std::make_unique<measure::ThroughputSeries>(
                  start, tput_window_us(cfg_.throughput.duration_s));
          {
            std::lock_guard<std::mutex> lock(mu_);
            up_series_[n->name] = series.get();
          }
          own[i] = std::move(series);
          workers.emplace_back([this, n, duration] {
            auto sock = transport::UdpSocket::bind_loopback();
            if (!sock) return;
            blast(sock.value(), hub_addr(), "tput/up/" + n->name,
                  cfg_.throughput.datagram_bytes, n->profile.rate_up_bps,
                  duration);
          });
        } else {
          auto series = std::make_unique<measure::ThroughputSeries>(
              start, tput_window_us(cfg_.throughput.duration_s));
          measure::ThroughputSeries* sp = series.get();
          own[i] = std::move(series);
          workers.emplace_back([this, n, sp, duration, start] {
            auto sock = transport::UdpSocket::bind_loopback();
            if (!sock) return;
            // announce, then record everything that lands until the deadline
            transport::SocketAddress me{"127.0.0.1", sock.value().port()};
            (void)sock.value().send_to(
                as_view(transport::encode_datagram("hello/" + n->name, {})),
                hub_addr());
            std::thread blaster([this, n, me, duration] {
              blast(*hub_udp_, me, "tput/down", cfg_.throughput.datagram_bytes,
                    n->profile.rate_down_bps, duration);
            });
            const auto deadline = SteadyClock::now() + duration +
                                  std::chrono::milliseconds(200);
            while (SteadyClock::now() < deadline) {
              auto got = sock.value().recv_from(std::chrono::milliseconds(20));
              if (!got) continue;
              sp->add(now_us(), got.value().first.size());
            }
            blaster.join();
          });
        }
      }
      for (std::thread& w : workers) w.join();
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      const std::int64_t end =
          start + std::llround(cfg_.throughput.duration_s * 1e6);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::lock_guard<std::mutex> lock(mu_);
        up_series_.erase(nodes[i]->name);
        own[i]->seal(end);
        const double rate = d == Direction::Up
                                ? nodes[i]->profile.rate_up_bps
                                : nodes[i]->profile.rate_down_bps;
        report_.throughput.push_back(ThroughputRow{
            nodes[i]->name, d, rate, std::move(*own[i])});
      }
    };
    if (cfg_.scenario == Scenario::Isolated) {
      for (const NodeConfig* node : cpes)
        for (Direction d : dirs) run_set({node}, d);
    } else {
      for (Direction d : dirs) run_set(cpes, d);
    }
  }

  void phase_echo() {
    const auto cpes = cpe_nodes(cfg_);
    const auto run_set = [&](const std::vector<const NodeConfig*>& nodes) {
      std::vector<std::thread> responders;
      std::vector<std::shared_ptr<std::atomic<bool>>> stops;
      for (const NodeConfig* n : nodes) {
        {
          std::lock_guard<std::mutex> lock(mu_);
          echo_[n->name] = std::make_unique<EchoState>();
          // a previous phase's hello may point at a socket that is gone
          node_addr_.erase(n->name);
        }
        auto stop = std::make_shared<std::atomic<bool>>(false);
        stops.push_back(stop);
        responders.emplace_back([this, n, stop] {
          auto sock = transport::UdpSocket::bind_loopback();
          if (!sock) return;
          (void)sock.value().send_to(
              as_view(transport::encode_datagram("hello/" + n->name, {})),
              hub_addr());
          while (!*stop) {
            auto got = sock.value().recv_from(std::chrono::milliseconds(20));
            if (!got) continue;
            auto dg = transport::decode_datagram(as_view(got.value().first));
            if (!dg || dg.value().topic != "echo/" + n->name) continue;
            (void)sock.value().send_to(
                as_view(transport::encode_datagram(
                    "echo-reply/" + n->name, as_view(dg.value().payload))),
                hub_addr());
          }
        });
      }
      // one prober thread per node, all concurrent within the set
      std::vector<std::thread> probers;
      for (const NodeConfig* n : nodes) {
        probers.emplace_back([this, n] {
          const auto addr = wait_node_addr(n->name);
          if (!addr) {
            std::lock_guard<std::mutex> lock(mu_);
            report_.flow_errors.push_back("echo: no hello from " + n->name);
            return;
          }
          const auto start = SteadyClock::now();
          const auto interval = std::chrono::microseconds(
              std::llround(cfg_.probe.interval_ms * 1000.0));
          for (std::uint64_t i = 0; i < cfg_.probe.count; ++i) {
            std::this_thread::sleep_until(start + interval * i);
            transport::EchoProbe probe{i, now_us(), cfg_.probe.pad_bytes};
            {
              std::lock_guard<std::mutex> lock(mu_);
              echo_[n->name]->outstanding.insert(i);
            }
            (void)hub_udp_->send_to(as_view(transport::encode_datagram(
                                        "echo/" + n->name,
                                        as_view(transport::encode_probe(probe)))),
                                    *addr);
          }
        });
      }
      for (std::thread& p : probers) p.join();
      std::this_thread::sleep_for(std::chrono::milliseconds(
          std::llround(cfg_.probe.timeout_ms)));
      for (auto& stop : stops) *stop = true;
      for (std::thread& r : responders) r.join();
      for (const NodeConfig* n : nodes) {
        std::lock_guard<std::mutex> lock(mu_);
        EchoState& es = *echo_[n->name];
        for (std::uint64_t seq : es.outstanding) es.stats.add_timeout(seq);
        report_.rtt.push_back(RttRow{n->name, std::move(es.stats)});
        echo_.erase(n->name);
      }
    };
    if (cfg_.scenario == Scenario::Isolated) {
      for (const NodeConfig* node : cpes) run_set({node});
    } else {
      run_set(cpes);
    }
  }

  void phase_app() {
    auto listener = transport::TcpListener::bind_loopback();
    if (!listener)
      throw CampaignRunError(CampaignError::BackendUnavailable,
                             "hub tcp bind failed: " + listener.error_detail());
    std::atomic<bool> app_stop{false};
    std::vector<std::thread> conn_threads;
    std::mutex conn_mu;
    std::thread acceptor([this, &listener, &app_stop, &conn_threads, &conn_mu] {
      while (!app_stop) {
        auto conn = listener.value().accept(std::chrono::milliseconds(50));
        if (!conn) continue;
        auto stream =
            std::make_shared<transport::TcpStream>(std::move(conn).take());
        std::lock_guard<std::mutex> lock(conn_mu);
        conn_threads.emplace_back([this, stream, &app_stop] {
          transport::StreamFrameAssembler assembler;
          Bytes chunk;
          while (true) {
            chunk.clear();  // recv_some appends; the assembler buffers across reads
            auto n = stream->recv_some(chunk, std::chrono::milliseconds(50));
            if (!n) {
              if (n.error() == transport::TransportError::Timeout) {
                if (app_stop) return;
                continue;
              }
              return;
            }
            if (n.value() == 0) return;  // orderly close
            assembler.feed(as_view(chunk));
            while (true) {
              auto frame = assembler.next();
              if (!frame) return;
              if (!frame.value()) break;
              if (frame.value()->kind !=
                  static_cast<std::uint8_t>(FrameKind::Telemetry))
                continue;
              auto env = telemetry::decode_envelope(as_view(frame.value()->body));
              if (!env) continue;
              const auto it = flow_index_.find(
                  flow_key(env.value().source_id, env.value().message_class,
                           measure::TransportRole::Stream));
              if (it != flow_index_.end())
                it->second->ledger.record_rx(env.value());
            }
          }
        });
      }
    });

    const std::uint16_t tcp_port = listener.value().port();
    const auto run_set = [&](const NodeConfig* only) {
      std::vector<std::thread> senders;
      for (FlowRuntime& f : flows_) {
        if (only && f.node != only) continue;
        FlowRuntime* fr = &f;
        senders.emplace_back([this, fr, tcp_port] { flow_sender(*fr, tcp_port); });
      }
      for (std::thread& s : senders) s.join();
    };
    if (cfg_.scenario == Scenario::Isolated) {
      for (const NodeConfig& node : cfg_.nodes) {
        if (node.is_hub || node.source_id == 0) continue;
        run_set(&node);
      }
    } else {
      run_set(nullptr);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    app_stop = true;
    acceptor.join();
    std::lock_guard<std::mutex> lock(conn_mu);
    for (std::thread& t : conn_threads) t.join();
  }

  void flow_sender(FlowRuntime& f, std::uint16_t tcp_port) {
    const std::int64_t duration = std::llround(cfg_.app_duration_s * 1e6);
    const auto times = telemetry::emission_times(f.spec, duration);
    std::optional<transport::TcpStream> tcp;
    std::optional<transport::UdpSocket> udp;
    if (f.role == measure::TransportRole::Stream) {
      auto c = transport::TcpStream::connect({"127.0.0.1", tcp_port});
      if (!c) {
        std::lock_guard<std::mutex> lock(mu_);
        report_.flow_errors.push_back(measure::flow_id_label(f.ledger.id()) +
                                      ": tcp connect failed");
        return;
      }
      tcp.emplace(std::move(c).take());
    } else {
      auto s = transport::UdpSocket::bind_loopback();
      if (!s) {
        std::lock_guard<std::mutex> lock(mu_);
        report_.flow_errors.push_back(measure::flow_id_label(f.ledger.id()) +
                                      ": udp bind failed");
        return;
      }
      udp.emplace(std::move(s).take());
    }
    const auto start = SteadyClock::now();
    for (const std::int64_t tk : times) {
      std::this_thread::sleep_until(start + std::chrono::microseconds(tk));
      const std::int64_t now = now_us();
      const telemetry::TelemetryRecord record = telemetry::generate_record(
          f.spec.kind, f.spec.source_id, now, cfg_.seed);
      const telemetry::TelemetryEnvelope env = telemetry::make_envelope(
          f.spec.source_id, f.spec.message_class, f.next_seq++, now,
          telemetry::serialize_record(record));
      f.ledger.record_tx(env);
      const Bytes bytes = telemetry::encode_envelope(env);
      if (tcp) {
        auto sent = tcp->send_all(as_view(transport::encode_stream_frame(
            static_cast<std::uint8_t>(FrameKind::Telemetry), as_view(bytes))));
        if (!sent) {
          std::lock_guard<std::mutex> lock(mu_);
          report_.flow_errors.push_back(measure::flow_id_label(f.ledger.id()) +
                                        ": tcp send failed");
          break;
        }
      } else {
        // datagrams are fire-and-forget; the ledger counts what arrives
        (void)udp->send_to(as_view(transport::encode_datagram(
                               "telemetry/" + f.node->name, as_view(bytes))),
                           hub_addr());
      }
    }
    if (tcp) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      tcp->shutdown_send();
    }
  }

  struct EchoState {
    measure::RttStats stats;
    std::set<std::uint64_t> outstanding;
  };

  const CampaignConfig& cfg_;
  CampaignReport& report_;
  SteadyClock::time_point t0_;
  std::unique_ptr<transport::UdpSocket> hub_udp_;
  std::vector<FlowRuntime> flows_;
  std::map<FlowKey, FlowRuntime*> flow_index_;
  std::atomic<bool> stop_{false};
  std::mutex mu_;
  std::map<std::string, transport::SocketAddress> node_addr_;
  std::map<std::string, measure::ThroughputSeries*> up_series_;
  std::map<std::string, std::unique_ptr<EchoState>> echo_;
};

}  // namespace

CampaignReport run_campaign(const CampaignConfig& config) {
  const auto wall_start = std::chrono::steady_clock::now();
  CampaignReport report;
  report.config = config;
  report.seed = config.seed;
  if (config.backend == Backend::Virtual) {
    VirtualRunner runner(config, report);
    runner.run();
  } else {
    SocketsRunner runner(config, report);
    runner.run();
  }
  if (config.radio.enabled)
    report.coverage = campaign_coverage(config).points;
  check_thresholds(report);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    wall_start)
          .count();
  return report;
}

radio::CoverageMap campaign_coverage(const CampaignConfig& config) {
  const NodeConfig& hub = hub_node(config);
  radio::RadioNode bs{hub.name,         hub.x_m,
                      hub.y_m,          hub.antenna_height_m,
                      hub.tx_power_dbm, hub.antenna_gain_dbi,
                      radio::NodeRole::BaseStation};
  std::vector<radio::RadioNode> cpes;
  for (const NodeConfig* n : cpe_nodes(config))
    cpes.push_back(radio::RadioNode{n->name, n->x_m, n->y_m,
                                    n->antenna_height_m, n->tx_power_dbm,
                                    n->antenna_gain_dbi, radio::NodeRole::Cpe});
  radio::GridSpec spec = config.radio.grid;
  spec.noise_dbm = radio::noise_floor(config.radio.bandwidth_mhz * 1e6,
                                      config.radio.noise_figure_db);
  return radio::coverage_grid(bs, cpes, config.radio.params, spec);
}

}  // namespace gridbench::bench
