#pragma once

#include <cstdint>

#include "gridbench/common/result.hpp"

namespace gridbench::netem {

enum class ProfileErrorCode : std::uint8_t {
  BadLossParams,
  BadTargetProbability,
  BadRate,
  BadQueueBound,
};
using ProfileError = CodedError<ProfileErrorCode>;

// Impairments of one radio link, both directions. Loss is driven by the
// logistic SINR mapping below; delay is base plus uniform jitter; each
// direction is shaped by a token bucket at its configured rate.
struct LinkProfile {
  double sinr_db = 20.0;
  double loss_k = 1.0;         // logistic steepness, per dB
  double loss_theta_db = 0.0;  // logistic midpoint
  double base_delay_ms = 10.0;
  double jitter_ms = 0.0;      // half-width of the uniform jitter
  double rate_up_bps = 85e6;
  double rate_down_bps = 85e6;
  double reorder_prob = 0.0;   // chance a frame is held back and overtaken
  std::uint32_t queue_frames = 256;
  double bucket_bytes = 4096;  // shaper burst allowance
};

// p = 1 / (1 + exp(loss_k * (sinr_db - loss_theta_db))). Monotone decreasing
// in sinr; p(theta) = 0.5. Throws BadLossParams unless loss_k > 0.
double loss_probability(double sinr_db, double loss_k, double loss_theta_db);

// Midpoint that makes loss_probability(sinr_db, loss_k, theta) == target_p:
// theta = sinr - ln(1/p - 1) / k. Used to calibrate links to measured rates.
double invert_loss_theta(double sinr_db, double loss_k, double target_p);

}  // namespace gridbench::netem
