#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "support/gen.hpp"

#include "gridbench/common/rng.hpp"
#include "gridbench/netem/clock.hpp"
#include "gridbench/netem/link.hpp"
#include "gridbench/netem/profile.hpp"

using namespace gridbench;
using namespace gridbench::netem;

TEST_CASE("clock fires equal timestamps in insertion order") {
  VirtualClock clock;
  std::vector<int> order;
  clock.schedule(5, [&] { order.push_back(1); });
  clock.schedule(5, [&] { order.push_back(2); });
  clock.schedule(3, [&] { order.push_back(0); });
  clock.schedule(5, [&] { order.push_back(3); });
  clock.run_all();
  CHECK(order == std::vector<int>{0, 1, 2, 3});
  CHECK(clock.now_us() == 5);
}

TEST_CASE("clock order matches a stable-sort oracle on 10^4 random events") {
  VirtualClock clock;
  Rng rng(31337);
  struct Ev { std::int64_t t; int idx; };
  std::vector<Ev> evs;
  std::vector<int> fired;
  for (int i = 0; i < 10000; ++i) {
    const std::int64_t t = rng.uniform_int(0, 200);  // dense → many ties
    evs.push_back({t, i});
    clock.schedule(t, [&fired, i] { fired.push_back(i); });
  }
  std::stable_sort(evs.begin(), evs.end(),
                   [](const Ev& a, const Ev& b) { return a.t < b.t; });
  clock.run_all();
  REQUIRE(fired.size() == evs.size());
  for (std::size_t i = 0; i < evs.size(); ++i) CHECK(fired[i] == evs[i].idx);
}

TEST_CASE("events scheduled at the current instant still fire in run_until") {
  VirtualClock clock;
  std::vector<int> order;
  clock.schedule(10, [&] {
    order.push_back(0);
    clock.schedule(10, [&] { order.push_back(1); });
  });
  clock.run_until(10);
  CHECK(order == std::vector<int>{0, 1});
  CHECK(clock.now_us() == 10);
}

TEST_CASE("clock rejects the degenerate operations") {
  VirtualClock clock;
  CHECK_THROWS_AS(clock.step(), ClockError);
  clock.schedule(5, [] {});
  clock.run_all();
  CHECK_THROWS_AS(clock.schedule(4, [] {}), ClockError);
  CHECK_NOTHROW(clock.schedule(5, [] {}));  // "now" is allowed
}

TEST_CASE("logistic loss curve: midpoint, monotonicity, calibration inverse") {
  CHECK(loss_probability(7.5, 2.0, 7.5) == doctest::Approx(0.5));
  CHECK(loss_probability(-3.0, 1.0, -3.0) == doctest::Approx(0.5));

  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const double k = rng.uniform(0.1, 5.0);
    const double theta = rng.uniform(-20, 20);
    const double a = rng.uniform(-30, 30);
    const double b = a + rng.uniform(0.001, 10.0);
    // non-strict globally: the curve saturates to exactly 0 / 1 in double
    // far from theta, so equal neighbours are legitimate out there
    CHECK(loss_probability(a, k, theta) >= loss_probability(b, k, theta));
    // strict monotonicity away from saturation
    CHECK(loss_probability(theta - 1, k, theta) >
          loss_probability(theta, k, theta));
    CHECK(loss_probability(theta, k, theta) >
          loss_probability(theta + 1, k, theta));

    const double p = rng.uniform(1e-6, 1.0 - 1e-6);
    const double cal = invert_loss_theta(a, k, p);
    CHECK(loss_probability(a, k, cal) == doctest::Approx(p).epsilon(1e-9));
  }

  // Frozen value: p = 0.2178% at k = 1 sits 6.1267 dB below the operating SINR.
  const double theta = invert_loss_theta(20.0, 1.0, 0.002178);
  CHECK(theta == doctest::Approx(20.0 - 6.12671).epsilon(1e-4));

  CHECK_THROWS_AS(loss_probability(0, 0.0, 0), ProfileError);
  CHECK_THROWS_AS(invert_loss_theta(0, 1.0, 0.0), ProfileError);
  CHECK_THROWS_AS(invert_loss_theta(0, 1.0, 1.0), ProfileError);
}

TEST_CASE("channel loss count lands inside 3 binomial sigma") {
  const double target_p = 0.01;
  VirtualClock clock;
  LinkProfile prof;
  prof.sinr_db = 0.0;
  prof.loss_k = 1.0;
  prof.loss_theta_db = invert_loss_theta(0.0, 1.0, target_p);
  prof.base_delay_ms = 0.0;
  prof.queue_frames = 200000;
  Link link(clock, "loss", prof, 1e12, 42);

  const int n = 100000;
  for (int i = 0; i < n; ++i) link.send(Bytes{0xAB});
  clock.run_all();

  const double sigma = std::sqrt(n * target_p * (1 - target_p));
  CHECK(link.transmitted() == static_cast<std::uint64_t>(n));
  CHECK(link.dropped_congestion() == 0);
  CHECK(static_cast<double>(link.dropped_channel()) >= n * target_p - 3 * sigma);
  CHECK(static_cast<double>(link.dropped_channel()) <= n * target_p + 3 * sigma);
  CHECK(link.delivered() + link.dropped_channel() == link.transmitted());
}

TEST_CASE("per-frame draw triple replays against a reference stream") {
  // White-box contract: each admitted frame consumes exactly three draws
  // (loss, jitter, reorder) in that order; congestion drops consume none.
  const std::uint64_t seed = 12345;
  LinkProfile prof;
  prof.sinr_db = 0.0;  // p = 0.5
  prof.base_delay_ms = 5.0;
  prof.jitter_ms = 2.0;
  prof.reorder_prob = 0.25;
  prof.queue_frames = 100000;
  VirtualClock clock;
  Link link(clock, "replay", prof, 1e9, seed);

  std::vector<int> got;
  link.set_deliver([&](Bytes f, std::int64_t) { got.push_back(f[0]); });

  Rng ref(seed);
  const double p = loss_probability(prof.sinr_db, prof.loss_k, prof.loss_theta_db);
  std::vector<int> expect;
  for (int i = 0; i < 200; ++i) {
    link.send(Bytes{static_cast<std::uint8_t>(i)});
    const double u_loss = ref.uniform01();
    ref.uniform01();  // jitter draw
    ref.uniform01();  // reorder draw
    if (!(u_loss < p)) expect.push_back(i);
  }
  clock.run_all();

  std::sort(got.begin(), got.end());
  CHECK(got == expect);  // expect is already ascending
}

TEST_CASE("congestion drops consume no draws and keep the stream aligned") {
  const std::uint64_t seed = 777;
  LinkProfile prof;
  prof.sinr_db = 0.0;  // p = 0.5
  prof.base_delay_ms = 0.0;
  prof.queue_frames = 1;
  VirtualClock clock;
  Link link(clock, "cong", prof, 1e12, seed);

  std::vector<int> got;
  link.set_deliver([&](Bytes f, std::int64_t) { got.push_back(f[0]); });

  link.send(Bytes{1});  // admitted: draws 1..3
  link.send(Bytes{2});  // queue full: dropped, no draws
  link.send(Bytes{3});  // queue full: dropped, no draws
  clock.run_all();
  link.send(Bytes{4});  // admitted: draws 4..6
  clock.run_all();

  CHECK(link.dropped_congestion() == 2);

  Rng ref(seed);
  const double p = 0.5;
  std::vector<int> expect;
  if (!(ref.uniform01() < p)) expect.push_back(1);
  ref.uniform01(); ref.uniform01();
  if (!(ref.uniform01() < p)) expect.push_back(4);
  std::sort(got.begin(), got.end());
  CHECK(got == expect);
}

TEST_CASE("shaper long-run rate is exact under refill-on-departure") {
  VirtualClock clock;
  LinkProfile prof;
  prof.loss_theta_db = -700.0;  // p underflows to exactly 0
  prof.base_delay_ms = 0.0;
  const double rate = 1e6;  // 125 B frame -> 1000 us on the wire
  Link link(clock, "shape", prof, rate, 9);

  const int total = 2000;
  const std::size_t frame_bytes = 125;
  int sent = 0;
  std::int64_t last_delivery = -1;
  link.set_deliver([&](Bytes, std::int64_t at) { last_delivery = at; });
  auto push = [&] {
    if (sent < total) {
      ++sent;
      link.send(Bytes(frame_bytes, 0));
    }
  };
  link.set_on_departure([&](std::int64_t) { push(); });
  push();
  clock.run_all();

  CHECK(link.delivered() == static_cast<std::uint64_t>(total));
  // Bucket (4096 B) bursts out instantly; the rest drains at exactly rate.
  const std::int64_t expected_us = std::llround(
      (static_cast<double>(total) * frame_bytes - prof.bucket_bytes) * 8e6 / rate);
  CHECK(last_delivery >= expected_us - 2);
  CHECK(last_delivery <= expected_us + 2);
}

TEST_CASE("small frame with zero jitter arrives after exactly the base delay") {
  VirtualClock clock;
  LinkProfile prof;
  prof.loss_theta_db = -700.0;
  prof.base_delay_ms = 10.0;
  Link link(clock, "exact", prof, 85e6, 3);
  std::int64_t at = -1;
  link.set_deliver([&](Bytes, std::int64_t t) { at = t; });
  clock.schedule(5000, [&] { link.send(Bytes(100, 0)); });
  clock.run_all();
  CHECK(at == 15000);  // instant departure (full bucket) + 10 ms, no rounding
}

TEST_CASE("jitter keeps deliveries inside base +/- width and reorders overtake") {
  VirtualClock clock;
  LinkProfile prof;
  prof.loss_theta_db = -700.0;
  prof.base_delay_ms = 10.0;
  prof.jitter_ms = 2.0;
  prof.reorder_prob = 0.1;
  prof.queue_frames = 10000;
  Link link(clock, "jit", prof, 1e12, 77);

  std::vector<std::pair<std::int64_t, int>> got;  // (delivery time, frame id)
  link.set_deliver([&](Bytes f, std::int64_t t) {
    got.push_back({t, f[0] | (f[1] << 8)});
  });
  const int n = 2000;
  for (int i = 0; i < n; ++i)
    link.send(Bytes{static_cast<std::uint8_t>(i & 0xFF),
                    static_cast<std::uint8_t>(i >> 8)});
  clock.run_all();

  REQUIRE(static_cast<int>(got.size()) == n);
  double sum_ms = 0;
  bool out_of_order = false;
  int prev_id = -1;
  for (const auto& [t, id] : got) {
    // everything departed at t=0 (rate is effectively infinite)
    CHECK(t >= 8000);
    CHECK(t <= 12000 + 5000);  // reordered frames: +2*jitter+1ms hold-back
    sum_ms += static_cast<double>(t) / 1000.0;
    if (id < prev_id) out_of_order = true;
    prev_id = id;
  }
  CHECK(out_of_order);
  CHECK(sum_ms / n == doctest::Approx(10.0 + 0.1 * 5.0).epsilon(0.05));
}

TEST_CASE("conservation: every transmitted frame is accounted once") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    VirtualClock clock;
    LinkProfile prof;
    prof.sinr_db = rng.uniform(-5, 25);
    prof.base_delay_ms = rng.uniform(0, 20);
    prof.jitter_ms = rng.uniform(0, 5);
    prof.reorder_prob = rng.uniform(0, 0.5);
    prof.queue_frames = static_cast<std::uint32_t>(rng.uniform_int(1, 64));
    Link link(clock, "cons", prof, rng.uniform(1e4, 1e8), rng.next_u64());
    const int n = static_cast<int>(rng.uniform_int(1, 2000));
    for (int i = 0; i < n; ++i) {
      link.send(testsupport::gen_bytes(rng, 200));
      if (rng.bernoulli(0.3)) clock.run_until(clock.now_us() + rng.uniform_int(0, 3000));
    }
    clock.run_all();
    CHECK(link.transmitted() == static_cast<std::uint64_t>(n));
    CHECK(link.delivered() + link.dropped_channel() + link.dropped_congestion() ==
          link.transmitted());
    CHECK(link.in_queue() == 0);
  }
}

TEST_CASE("cell pool splits capacity evenly, capped by configured rates") {
  VirtualClock clock;
  LinkProfile prof;
  Link a(clock, "a", prof, 85e6, 1);
  Link b(clock, "b", prof, 85e6, 2);
  Link c(clock, "c", prof, 10e6, 3);

  apply_cell_pool({&a, &b, &c}, 37.5e6);
  CHECK(a.effective_rate_bps() == doctest::Approx(12.5e6));
  CHECK(b.effective_rate_bps() == doctest::Approx(12.5e6));
  CHECK(c.effective_rate_bps() == doctest::Approx(10e6));  // own cap is lower

  // Re-applying must not compound: the share comes from configured rates.
  apply_cell_pool({&a, &b, &c}, 37.5e6);
  CHECK(a.effective_rate_bps() == doctest::Approx(12.5e6));

  apply_cell_pool({&a}, 300e6);
  CHECK(a.effective_rate_bps() == doctest::Approx(85e6));  // pool exceeds cap

  a.clear_rate_override();
  CHECK(a.effective_rate_bps() == doctest::Approx(85e6));
  CHECK_THROWS_AS(apply_cell_pool({&a}, 0.0), ProfileError);
}

TEST_CASE("trace sink records drops and deliveries with causes") {
  VirtualClock clock;
  TraceSink trace;
  LinkProfile prof;
  prof.loss_theta_db = 700.0;  // p = 1: every admitted frame drops on channel
  prof.base_delay_ms = 0.0;
  prof.queue_frames = 1;
  Link link(clock, "traced", prof, 1e12, 4, &trace);
  link.send(Bytes{1});
  link.send(Bytes{2});  // congestion (queue holds one)
  clock.run_all();

  REQUIRE(trace.size() == 2);
  CHECK(trace[0].event == "dropped");
  CHECK(trace[0].cause == "congestion");
  CHECK(trace[1].event == "dropped");
  CHECK(trace[1].cause == "channel");
  CHECK(trace[1].link == "traced");
}

TEST_CASE("profile validation rejects out-of-range settings") {
  VirtualClock clock;
  LinkProfile prof;
  CHECK_THROWS_AS(Link(clock, "x", prof, 0.0, 1), ProfileError);
  prof.queue_frames = 0;
  CHECK_THROWS_AS(Link(clock, "x", prof, 1e6, 1), ProfileError);
  prof.queue_frames = 1;
  prof.reorder_prob = 1.5;
  CHECK_THROWS_AS(Link(clock, "x", prof, 1e6, 1), ProfileError);
  prof.reorder_prob = 0.0;
  prof.base_delay_ms = -1.0;
  CHECK_THROWS_AS(Link(clock, "x", prof, 1e6, 1), ProfileError);
}
