#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gridbench/common/bytes.hpp"
#include "gridbench/common/rng.hpp"
#include "gridbench/netem/clock.hpp"
#include "gridbench/netem/profile.hpp"

namespace gridbench::netem {

enum class DropCause : std::uint8_t { None = 0, Channel = 1, Congestion = 2 };

const char* drop_cause_name(DropCause cause);

struct TraceRow {
  std::int64_t time_us;
  std::string link;
  std::string event;  // "delivered" | "dropped"
  std::string cause;  // "none" | "channel" | "congestion"
  std::uint32_t size_bytes;
};

using TraceSink = std::vector<TraceRow>;

// One direction of one emulated radio link: bounded FIFO into a token-bucket
// shaper, then a Bernoulli channel-loss decision and base+jitter delay.
//
// Determinism contract: every frame that clears the queue-bound check
// consumes exactly three draws from this link's RNG stream, in order —
// channel loss, jitter, reorder — at send() time. Congestion drops consume
// none. The RNG stream is derived from (campaign seed, link name), so traces
// are reproducible bit-for-bit.
class Link {
 public:
  using DeliverFn = std::function<void(Bytes frame, std::int64_t at_us)>;
  using DepartureFn = std::function<void(std::int64_t at_us)>;

  Link(VirtualClock& clock, std::string name, const LinkProfile& profile,
       double rate_bps, std::uint64_t rng_seed, TraceSink* trace = nullptr);

  void set_deliver(DeliverFn fn) { deliver_ = std::move(fn); }
  // Fires when a frame leaves the shaper; throughput sources use this to
  // keep the queue primed without overflowing it.
  void set_on_departure(DepartureFn fn) { on_departure_ = std::move(fn); }

  // Shared-cell capacity pools override the configured rate for a phase.
  void set_rate_override(double rate_bps);
  void clear_rate_override();
  double effective_rate_bps() const { return rate_bps_; }
  double configured_rate_bps() const { return configured_rate_bps_; }

  void send(Bytes frame);

  const std::string& name() const { return name_; }
  std::uint64_t transmitted() const { return transmitted_; }
  std::uint64_t delivered() const { return delivered_; }
  std::uint64_t dropped_channel() const { return dropped_channel_; }
  std::uint64_t dropped_congestion() const { return dropped_congestion_; }
  std::uint32_t in_queue() const { return in_queue_; }

 private:
  void trace(std::int64_t t_us, const char* event, const char* cause,
             std::size_t size) const;

  VirtualClock& clock_;
  std::string name_;
  LinkProfile profile_;
  double rate_bps_;
  double configured_rate_bps_;
  double p_loss_ = 0.0;
  Rng rng_;
  TraceSink* trace_;

  // Shaper state: token count as of the last (fractional) departure instant.
  double tokens_ = 0.0;
  double tail_us_ = 0.0;
  std::uint32_t in_queue_ = 0;

  DeliverFn deliver_;
  DepartureFn on_departure_;

  std::uint64_t transmitted_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_channel_ = 0;
  std::uint64_t dropped_congestion_ = 0;
};

// Static equal split of a shared uplink capacity pool: every link gets
// min(its configured rate, pool / count). Pass the links active in the phase.
void apply_cell_pool(const std::vector<Link*>& links, double pool_bps);

}  // namespace gridbench::netem
