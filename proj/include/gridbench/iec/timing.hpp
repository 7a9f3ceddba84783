#pragma once

#include <cstdint>

#include "gridbench/common/result.hpp"

namespace gridbench::iec {

enum class TimingErrorCode { ZeroFrequency, ZeroSpp, InvalidSpp, NegativeDelay };
using TimingError = CodedError<TimingErrorCode>;

/// Exact sample interval in microseconds (num/den, reduced, den > 0).
struct RationalMicros {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const RationalMicros&) const = default;
};

enum class SppPolicy {
  Strict92Le,  // spp must be 80 or 256
  AnyPositive,
};

/// 1/(spp * freq) in microseconds, exact. Throws TimingError.
RationalMicros sv_sample_interval(std::uint32_t spp, std::uint32_t freq_hz,
                                  SppPolicy policy = SppPolicy::Strict92Le);

inline constexpr double kSvDeadlineMs = 208.3;

enum class DeadlineVerdict { WithinDeadline, DeadlineViolated };

/// Strict bound: equality with the deadline is a violation. Throws
/// TimingError(NegativeDelay) on negative input.
DeadlineVerdict sv_deadline_check(double observed_delay_ms);

}  // namespace gridbench::iec
