#include "gridbench/iec/timing.hpp"

#include <numeric>

namespace gridbench::iec {

RationalMicros sv_sample_interval(std::uint32_t spp, std::uint32_t freq_hz,
                                  SppPolicy policy) {
  if (spp == 0) throw TimingError(TimingErrorCode::ZeroSpp, "spp must be positive");
  if (freq_hz == 0)
    throw TimingError(TimingErrorCode::ZeroFrequency, "frequency must be positive");
  if (policy == SppPolicy::Strict92Le && spp != 80 && spp != 256)
    throw TimingError(TimingErrorCode::InvalidSpp,
                      "spp must be 80 or 256 under the 9-2LE policy");
  std::int64_t num = 1'000'000;
  std::int64_t den = static_cast<std::int64_t>(spp) * freq_hz;
  std::int64_t g = std::gcd(num, den);
  return RationalMicros{num / g, den / g};
}

DeadlineVerdict sv_deadline_check(double observed_delay_ms) {
  if (observed_delay_ms < 0.0)
    throw TimingError(TimingErrorCode::NegativeDelay, "delay must be non-negative");
  return observed_delay_ms < kSvDeadlineMs ? DeadlineVerdict::WithinDeadline
                                           : DeadlineVerdict::DeadlineViolated;
}

}  // namespace gridbench::iec
