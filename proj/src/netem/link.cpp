#include "gridbench/netem/link.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace gridbench::netem {

double loss_probability(double sinr_db, double loss_k, double loss_theta_db) {
  if (!(loss_k > 0.0))
    throw ProfileError(ProfileErrorCode::BadLossParams, "loss_k must be positive");
  return 1.0 / (1.0 + std::exp(loss_k * (sinr_db - loss_theta_db)));
}

double invert_loss_theta(double sinr_db, double loss_k, double target_p) {
  if (!(loss_k > 0.0))
    throw ProfileError(ProfileErrorCode::BadLossParams, "loss_k must be positive");
  if (!(target_p > 0.0) || !(target_p < 1.0))
    throw ProfileError(ProfileErrorCode::BadTargetProbability,
                       "target probability must be in (0, 1)");
  return sinr_db - std::log(1.0 / target_p - 1.0) / loss_k;
}

const char* drop_cause_name(DropCause cause) {
  switch (cause) {
    case DropCause::None: return "none";
    case DropCause::Channel: return "channel";
    case DropCause::Congestion: return "congestion";
  }
  return "unknown";
}

Link::Link(VirtualClock& clock, std::string name, const LinkProfile& profile,
           double rate_bps, std::uint64_t rng_seed, TraceSink* trace)
    : clock_(clock),
      name_(std::move(name)),
      profile_(profile),
      rate_bps_(rate_bps),
      configured_rate_bps_(rate_bps),
      rng_(rng_seed),
      trace_(trace),
      tokens_(profile.bucket_bytes) {
  if (!(rate_bps > 0.0))
    throw ProfileError(ProfileErrorCode::BadRate, "link rate must be positive");
  if (profile.queue_frames < 1)
    throw ProfileError(ProfileErrorCode::BadQueueBound, "queue bound must be >= 1");
  if (!(profile.bucket_bytes > 0.0))
    throw ProfileError(ProfileErrorCode::BadRate, "bucket depth must be positive");
  if (profile.base_delay_ms < 0.0 || profile.jitter_ms < 0.0)
    throw ProfileError(ProfileErrorCode::BadRate, "delays must be non-negative");
  if (profile.reorder_prob < 0.0 || profile.reorder_prob > 1.0)
    throw ProfileError(ProfileErrorCode::BadRate, "reorder_prob must be in [0, 1]");
  p_loss_ = loss_probability(profile.sinr_db, profile.loss_k, profile.loss_theta_db);
}

void Link::set_rate_override(double rate_bps) {
  if (!(rate_bps > 0.0))
    throw ProfileError(ProfileErrorCode::BadRate, "rate override must be positive");
  rate_bps_ = rate_bps;
}

void Link::clear_rate_override() { rate_bps_ = configured_rate_bps_; }

void Link::trace(std::int64_t t_us, const char* event, const char* cause,
                 std::size_t size) const {
  if (trace_)
    trace_->push_back(TraceRow{t_us, name_, event, cause,
                               static_cast<std::uint32_t>(size)});
}

void Link::send(Bytes frame) {
  ++transmitted_;
  const std::size_t size = frame.size();
  if (in_queue_ >= profile_.queue_frames) {
    ++dropped_congestion_;
    trace(clock_.now_us(), "dropped", "congestion", size);
    return;
  }

  // The per-frame draw triple. Order is part of the wire-level contract.
  const double u_loss = rng_.uniform01();
  const double u_jitter = rng_.uniform01();
  const double u_reorder = rng_.uniform01();

  // Token-bucket shaper. Fractional state stays in doubles; only scheduled
  // event times quantize to the clock's integer microseconds, so the
  // long-run rate is exact.
  const double now = static_cast<double>(clock_.now_us());
  const double start = std::max(now, tail_us_);
  const double bytes_per_us = rate_bps_ / 8e6;
  double tokens = std::min(profile_.bucket_bytes,
                           tokens_ + bytes_per_us * (start - tail_us_));
  double depart_exact;
  if (tokens >= static_cast<double>(size)) {
    depart_exact = start;
    tokens_ = tokens - static_cast<double>(size);
  } else {
    depart_exact = start + (static_cast<double>(size) - tokens) / bytes_per_us;
    tokens_ = 0.0;
  }
  tail_us_ = depart_exact;
  const std::int64_t depart_us =
      std::max<std::int64_t>(clock_.now_us(), std::llround(depart_exact));

  double delay_ms = profile_.base_delay_ms +
                    (2.0 * u_jitter - 1.0) * profile_.jitter_ms;
  // Reordering is modeled as hold-back: the selected frame is delayed past
  // its neighbors' jitter range so successors overtake it.
  if (u_reorder < profile_.reorder_prob)
    delay_ms += 2.0 * profile_.jitter_ms + 1.0;
  if (delay_ms < 0.0) delay_ms = 0.0;
  const std::int64_t delivery_us = depart_us + std::llround(delay_ms * 1000.0);

  const bool channel_drop = u_loss < p_loss_;
  ++in_queue_;
  clock_.schedule(depart_us, [this, size, channel_drop, delivery_us,
                              frame = std::move(frame)]() mutable {
    --in_queue_;
    if (on_departure_) on_departure_(clock_.now_us());
    if (channel_drop) {
      ++dropped_channel_;
      trace(clock_.now_us(), "dropped", "channel", size);
      return;
    }
    clock_.schedule(delivery_us, [this, size, frame = std::move(frame)]() mutable {
      ++delivered_;
      trace(clock_.now_us(), "delivered", "none", size);
      if (deliver_) deliver_(std::move(frame), clock_.now_us());
    });
  });
}

void apply_cell_pool(const std::vector<Link*>& links, double pool_bps) {
  if (links.empty()) return;
  if (!(pool_bps > 0.0))
    throw ProfileError(ProfileErrorCode::BadRate, "pool capacity must be positive");
  const double share = pool_bps / static_cast<double>(links.size());
  for (Link* link : links)
    link->set_rate_override(std::min(link->configured_rate_bps(), share));
}

}  // namespace gridbench::netem
