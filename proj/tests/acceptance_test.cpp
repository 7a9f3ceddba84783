// Acceptance gate: nine release criteria, one PASS/FAIL line each.
// Exit 0 only when every criterion holds at its stated tolerance.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "support/gen.hpp"

#include "gridbench/bench/campaign.hpp"
#include "gridbench/bench/config.hpp"
#include "gridbench/bench/report.hpp"
#include "gridbench/iec/messages.hpp"
#include "gridbench/iec/timing.hpp"
#include "gridbench/measure/ledger.hpp"
#include "gridbench/netem/clock.hpp"
#include "gridbench/netem/link.hpp"
#include "gridbench/radio/model.hpp"
#include "gridbench/telemetry/codec.hpp"

using namespace gridbench;

namespace {

using Verdict = std::pair<bool, std::string>;

double wall_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* format, ...) {
  char buf[768];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

bench::CampaignConfig parse_or_throw(const std::string& text) {
  auto r = bench::parse_config(text);
  if (!r.ok()) throw std::runtime_error("config parse: " + r.error_detail());
  return std::move(r).take();
}

// --- C1: reliable-stream flows lose nothing even on a 5%-loss channel ----

Verdict criterion_stream_zero_loss() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = parse_or_throw(R"(
[campaign]
seed = 101
backend = virtual
scenario = simultaneous
duration_s = 130
phases = a

[node PC0]
role = hub

[node Inverter01]
role = cpe
source_id = 1
loss_theta_db = 17.05556102
[node Inverter02]
role = cpe
source_id = 2
loss_theta_db = 17.05556102
[node Inverter03]
role = cpe
source_id = 3
loss_theta_db = 17.05556102

[plan]
transport = tcp
d1_period_s = 0.1
d2_period_s = 0.1
d3_period_s = 0.1
allow_any_period = true
)");
  const auto rep = bench::run_campaign(cfg);
  const double wall = wall_since(t0);

  bool pass = rep.ledgers.size() == 9 && rep.flow_errors.empty();
  std::uint64_t min_tx = UINT64_MAX;
  for (const auto& ledger : rep.ledgers) {
    min_tx = std::min(min_tx, ledger.tx_count());
    if (ledger.tx_count() < 1000 || ledger.rx_unique() != ledger.tx_count() ||
        ledger.loss_rate() != 0.0 || ledger.integrity_failures() != 0)
      pass = false;
  }
  if (wall >= 5.0) pass = false;
  return {pass,
          fmt("%zu/9 stream flows at exactly 0%% loss over a 5%%-loss channel, "
              ">=%llu envelopes each, %.0f virtual s, wall %.2f s (< 5 s)",
              rep.ledgers.size(),
              static_cast<unsigned long long>(min_tx == UINT64_MAX ? 0 : min_tx),
              static_cast<double>(rep.virtual_end_us) / 1e6, wall)};
}

// --- C2: calibrated datagram loss matches the field rates within 3 sigma --

Verdict criterion_datagram_loss() {
  const auto t0 = std::chrono::steady_clock::now();
  const double targets[3] = {0.002178, 0.0021669, 0.002777};
  bool pass = true;
  const int n = 100000;
  std::string note;
  for (int i = 0; i < 3; ++i) {
    netem::VirtualClock clock;
    netem::LinkProfile prof;
    prof.sinr_db = 20.0;
    prof.loss_k = 1.0;
    prof.loss_theta_db = netem::invert_loss_theta(20.0, 1.0, targets[i]);
    prof.base_delay_ms = 0.0;
    prof.queue_frames = 1u << 20;
    netem::Link link(clock, "inv", prof, 1e12,
                     derive_seed(2026, {static_cast<std::uint64_t>(i)}));
    for (int f = 0; f < n; ++f) link.send(Bytes(200, 0x55));
    clock.run_all();
    const double measured =
        static_cast<double>(link.dropped_channel()) / static_cast<double>(n);
    const double sigma = std::sqrt(targets[i] * (1.0 - targets[i]) / n);
    if (std::fabs(measured - targets[i]) > 3.0 * sigma) pass = false;
    note += fmt("%s%.4f/%.4f±%.4f%%", i ? ", " : "", measured * 100,
                targets[i] * 100, 3.0 * sigma * 100);
  }
  const double wall = wall_since(t0);
  if (wall >= 30.0) pass = false;
  return {pass, fmt("measured/target loss at 10^5 frames each: %s, wall %.2f s "
                    "(< 30 s)",
                    note.c_str(), wall)};
}

// --- C3: echo timing — jittered average and exact zero-jitter samples -----

std::string echo_config(double jitter_ms) {
  std::ostringstream out;
  out << R"(
[campaign]
seed = 31
backend = virtual
scenario = isolated
duration_s = 1
phases = e

[node PC0]
role = hub

[node Inverter01]
role = cpe
source_id = 1
base_delay_ms = 10
loss_theta_db = -700
jitter_ms = )" << jitter_ms
      << R"(

[probe]
count = 1000
interval_ms = 20
pad_bytes = 64
timeout_ms = 500
)";
  return out.str();
}

Verdict criterion_echo_timing() {
  const auto jittered = bench::run_campaign(parse_or_throw(echo_config(2.0)));
  bool pass = jittered.rtt.size() == 1;
  double avg_ms = 0.0;
  if (pass) {
    const auto s = jittered.rtt[0].stats.summary();
    avg_ms = s.avg_us / 1000.0;
    if (s.answered != 1000 || avg_ms < 19.5 || avg_ms > 20.5) pass = false;
  }

  const auto flat = bench::run_campaign(parse_or_throw(echo_config(0.0)));
  std::size_t exact = 0, total = 0;
  if (flat.rtt.size() == 1) {
    for (const auto& sample : flat.rtt[0].stats.samples()) {
      ++total;
      if (sample.rtt_us == 20000) ++exact;
    }
  }
  if (total != 1000 || exact != total) pass = false;
  return {pass, fmt("jittered avg %.3f ms within 20±0.5 ms; zero-jitter "
                    "%zu/%zu samples at exactly 20 ms",
                    avg_ms, exact, total)};
}

// --- C4: shaped throughput matches both field rates ----------------------

Verdict criterion_throughput() {
  const auto cfg = parse_or_throw(R"(
[campaign]
seed = 41
backend = virtual
scenario = simultaneous
duration_s = 1
phases = t

[node PC0]
role = hub

[node Fast]
role = cpe
loss_theta_db = -700

[node Slow]
role = cpe
loss_theta_db = -700
rate_up_bps = 111900
rate_down_bps = 111900

[throughput]
duration_s = 10
datagram_bytes = 1024
)");
  const auto rep = bench::run_campaign(cfg);
  bool pass = rep.throughput.size() == 4;
  std::string note;
  for (const auto& row : rep.throughput) {
    const double target = row.node == "Fast" ? 85e6 : 111900.0;
    const double tol = row.node == "Fast" ? 0.02 : 0.05;
    const double avg = row.series.summary().avg_bps;
    if (std::fabs(avg - target) / target > tol) pass = false;
    note += fmt("%s%s/%s %+.2f%%", note.empty() ? "" : ", ", row.node.c_str(),
                bench::direction_name(row.direction),
                100.0 * (avg - target) / target);
  }
  return {pass, fmt("avg vs 85 Mbps (±2%%) and 111.9 Kbps (±5%%) over 10 s: %s",
                    note.c_str())};
}

// --- C5: sampled-values cadence and delivery deadline ---------------------

Verdict criterion_sv_timing() {
  const auto interval = iec::sv_sample_interval(80, 50);
  bool pass = interval.num == 250 && interval.den == 1;
  if (iec::sv_deadline_check(208.3) != iec::DeadlineVerdict::DeadlineViolated)
    pass = false;
  if (iec::sv_deadline_check(208.2999) != iec::DeadlineVerdict::WithinDeadline)
    pass = false;
  if (iec::sv_deadline_check(0.0) != iec::DeadlineVerdict::WithinDeadline)
    pass = false;
  return {pass, fmt("interval(80 spp, 50 Hz) = %lld/%lld us; 208.3 ms is out, "
                    "208.2999 ms is in",
                    static_cast<long long>(interval.num),
                    static_cast<long long>(interval.den))};
}

// --- C6: codec roundtrips and decoder fuzz -------------------------------

Verdict criterion_codec_robustness() {
  Rng rng(0x61850);
  int sv_ok = 0, goose_ok = 0, routable_ok = 0, envelope_ok = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto sv = testsupport::gen_sv(rng);
    auto sv_back = iec::decode_sv(as_view(iec::encode_sv(sv).take()));
    if (sv_back.ok() && sv_back.value() == sv) ++sv_ok;

    const auto goose = testsupport::gen_goose(rng);
    auto go_back = iec::decode_goose(as_view(iec::encode_goose(goose).take()));
    if (go_back.ok() && go_back.value() == goose) ++goose_ok;

    iec::RoutableHeader hdr;
    hdr.session_id = static_cast<std::uint32_t>(rng.next_u64());
    hdr.hop_limit = static_cast<std::uint8_t>(rng.uniform_int(1, 255));
    hdr.payload_kind = iec::PayloadKind::Goose;
    const Bytes inner = testsupport::gen_bytes(rng, 512);
    auto wrapped = iec::wrap_routable(hdr, as_view(inner));
    if (wrapped.ok()) {
      auto un = iec::unwrap_routable(as_view(wrapped.value()));
      if (un.ok() && un.value().header == hdr && un.value().payload == inner)
        ++routable_ok;
    }

    const auto env = testsupport::gen_envelope(rng);
    auto env_back =
        telemetry::decode_envelope(as_view(telemetry::encode_envelope(env)));
    if (env_back.ok() && env_back.value() == env &&
        telemetry::integrity_ok(env_back.value()))
      ++envelope_ok;
  }
  bool pass = sv_ok == 10000 && goose_ok == 10000 && routable_ok == 10000 &&
              envelope_ok == 10000;

  // 10^6 fuzz inputs across the four decoders. Reaching the report line at
  // all is the no-crash claim; rejections must be typed errors, not aborts.
  std::uint64_t fuzz = 0, typed_rejections = 0;
  for (int round = 0; round < 250000; ++round) {
    const bool mutated = (round & 1) != 0;
    const Bytes a =
        mutated
            ? testsupport::mutate(rng,
                                  iec::encode_sv(testsupport::gen_sv(rng)).take())
            : testsupport::gen_bytes(rng, 200);
    const Bytes b =
        mutated
            ? testsupport::mutate(
                  rng, iec::encode_goose(testsupport::gen_goose(rng)).take())
            : testsupport::gen_bytes(rng, 200);
    const Bytes c = testsupport::gen_bytes(rng, 64);
    const Bytes d =
        mutated
            ? testsupport::mutate(
                  rng, telemetry::encode_envelope(testsupport::gen_envelope(rng)))
            : testsupport::gen_bytes(rng, 200);
    if (!iec::decode_sv(as_view(a)).ok()) ++typed_rejections;
    if (!iec::decode_goose(as_view(b)).ok()) ++typed_rejections;
    if (!iec::unwrap_routable(as_view(c)).ok()) ++typed_rejections;
    if (!telemetry::decode_envelope(as_view(d)).ok()) ++typed_rejections;
    fuzz += 4;
  }
  if (fuzz != 1000000 || typed_rejections == 0) pass = false;
  return {pass, fmt("4x10^4 roundtrips bit-exact (%d/%d/%d/%d), %llu fuzz "
                    "decodes, %llu typed rejections, zero aborts",
                    sv_ok, goose_ok, routable_ok, envelope_ok,
                    static_cast<unsigned long long>(fuzz),
                    static_cast<unsigned long long>(typed_rejections))};
}

// --- C7: streaming flow accounting equals brute-force recounting ----------

Verdict criterion_ledger_equivalence() {
  Rng rng(0xBEEF);
  const Bytes payload{1, 2, 3, 4};
  bool pass = true;
  std::uint64_t total_events = 0;
  for (int trace = 0; trace < 100 && pass; ++trace) {
    const measure::FlowId id{
        static_cast<std::uint8_t>(rng.uniform_int(1, 3)),
        static_cast<telemetry::MessageClass>(rng.uniform_int(1, 3)),
        rng.uniform_int(0, 1) ? measure::TransportRole::Stream
                              : measure::TransportRole::Datagram};
    measure::FlowLedger ledger(id);
    const auto events = rng.uniform_int(1, 100000);
    const auto span = rng.uniform_int(10, 120000);
    std::uint64_t tx = 0, uniques = 0, dups = 0, reorders = 0, corrupt = 0;
    std::set<std::uint64_t> seen;
    std::uint64_t highest = 0;
    bool any_rx = false;
    for (std::int64_t e = 0; e < events; ++e) {
      ++total_events;
      const auto seq = static_cast<std::uint64_t>(rng.uniform_int(0, span));
      auto env = telemetry::make_envelope(id.source_id, id.message_class, seq,
                                          0, payload);
      if (rng.bernoulli(0.25)) {
        ledger.record_tx(env);
        ++tx;
        continue;
      }
      const bool corrupted = rng.bernoulli(0.03);
      if (corrupted) env.integrity ^= 0x80000000u;
      ledger.record_rx(env);
      if (corrupted) {
        ++corrupt;
      } else if (seen.count(seq)) {
        ++dups;
      } else {
        seen.insert(seq);
        ++uniques;
        if (any_rx && seq < highest) ++reorders;
        if (!any_rx || seq > highest) {
          highest = seq;
          any_rx = true;
        }
      }
    }
    pass = ledger.tx_count() == tx && ledger.rx_unique() == uniques &&
           ledger.duplicates() == dups && ledger.reorders() == reorders &&
           ledger.integrity_failures() == corrupt;
  }
  return {pass,
          fmt("100 random traces, %llu events total: streaming counters == "
              "exact set-based recount",
              static_cast<unsigned long long>(total_events))};
}

// --- C8: radio link budget against an independent oracle ------------------

Verdict criterion_radio_budget() {
  radio::RadioNode bs{"bs", 0.0, 0.0, 25.0, 35.0, 4.0,
                      radio::NodeRole::BaseStation};
  radio::RadioNode cpe{"cpe", 1000.0, 0.0, 3.0, 23.0, 12.5,
                       radio::NodeRole::Cpe};
  radio::PropagationParams fs;  // free space: n = 2, no height term
  fs.pathloss_exponent = 2.0;
  fs.height_gain_coeff = 0.0;
  const double prx = radio::received_power(bs, cpe, fs);
  constexpr double kC = 299792458.0;
  constexpr double kPi = 3.14159265358979323846;
  const double oracle =
      35.0 + 4.0 + 12.5 - 20.0 * std::log10(4.0 * kPi * 1000.0 * 2.35e9 / kC);
  const bool budget_ok = std::fabs(prx - oracle) <= 0.01;
  const bool edge_ok =
      radio::coverage_class(-0.001) == radio::CoverageClass::Edge;
  return {budget_ok && edge_ok,
          fmt("received %.4f dBm vs first-principles %.4f dBm (|delta| <= "
              "0.01 dB); class(-0.001 dB) == Edge: %s",
              prx, oracle, edge_ok ? "yes" : "no")};
}

// --- C9: the replication campaign is bit-reproducible ---------------------

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

Verdict criterion_replication_determinism() {
  const auto cfg = parse_or_throw(R"(
[campaign]
seed = 61850
backend = virtual
scenario = simultaneous
duration_s = 130

[node PC0]
role = hub

[node Rectifier]
role = cpe
x_m = 90
y_m = 60

[node Inverter01]
role = cpe
source_id = 1
x_m = 420
y_m = 310
loss_theta_db = 13.87283212
jitter_ms = 2

[node Inverter02]
role = cpe
source_id = 2
x_m = -610
y_m = 240
loss_theta_db = 13.86771155
jitter_ms = 2

[node Inverter03]
role = cpe
source_id = 3
x_m = 150
y_m = -770
loss_theta_db = 14.11639679
jitter_ms = 2

[node SolarPanel]
role = cpe
x_m = -200
y_m = -150

[probe]
count = 1000
interval_ms = 20
pad_bytes = 64
timeout_ms = 1000

[throughput]
duration_s = 10
datagram_bytes = 1024

[radio]
extent_x_m = 2000
extent_y_m = 2000
resolution_m = 50
)");
  const auto rep_a = bench::run_campaign(cfg);
  const auto rep_b = bench::run_campaign(cfg);
  const auto paths_a = bench::emit_report(rep_a, "accept_c9_a");
  const auto paths_b = bench::emit_report(rep_b, "accept_c9_b");

  bool pass = paths_a.size() == paths_b.size() && !paths_a.empty();
  std::size_t bytes = 0;
  for (std::size_t i = 0; pass && i < paths_a.size(); ++i) {
    const std::string a = read_file_bytes(paths_a[i]);
    const std::string b = read_file_bytes(paths_b[i]);
    bytes += a.size();
    if (a.empty() || a != b) pass = false;
  }
  return {pass,
          fmt("two full runs at seed %llu, %zu report files, %zu bytes: "
              "byte-identical",
              static_cast<unsigned long long>(cfg.seed), paths_a.size(),
              bytes)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    Verdict (*run)();
  };
  const Criterion table[] = {
      {"C1", "stream-zero-loss", criterion_stream_zero_loss},
      {"C2", "datagram-loss-calibration", criterion_datagram_loss},
      {"C3", "echo-timing", criterion_echo_timing},
      {"C4", "throughput-replication", criterion_throughput},
      {"C5", "sv-cadence-and-deadline", criterion_sv_timing},
      {"C6", "codec-roundtrip-and-fuzz", criterion_codec_robustness},
      {"C7", "ledger-brute-force-equal", criterion_ledger_equivalence},
      {"C8", "radio-link-budget", criterion_radio_budget},
      {"C9", "replication-bit-identical", criterion_replication_determinism},
  };

  int failures = 0;
  for (const auto& c : table) {
    bool pass = false;
    std::string note;
    try {
      auto v = c.run();
      pass = v.first;
      note = std::move(v.second);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    std::printf("[ACCEPT] %-3s %-26s %s — %s\n", c.id, c.name,
                pass ? "PASS" : "FAIL", note.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  if (failures > 0) {
    std::printf("[ACCEPT] %d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("[ACCEPT] all 9 criteria passed\n");
  return 0;
}
