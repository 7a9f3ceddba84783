#pragma once

#include <cstdint>
#include <vector>

#include "gridbench/common/result.hpp"

namespace gridbench::measure {

enum class RttErrorCode : std::uint8_t { AllProbesLost, EmptySamples, BadPercentile };
using RttError = CodedError<RttErrorCode>;

// Nearest-rank percentile of a sorted ascending sample set:
// rank = ceil(pct/100 * N), 1-based. pct in (0, 100].
std::int64_t nearest_rank_percentile(const std::vector<std::int64_t>& sorted,
                                     double pct);

struct RttSample {
  std::uint64_t probe_seq;
  std::int64_t rtt_us;
};

// RTT probe outcomes for one node. Value statistics are recomputable from
// the raw samples; timeouts only enter the loss fraction.
class RttStats {
 public:
  struct Summary {
    std::int64_t min_us;
    double avg_us;
    std::int64_t p50_us;
    std::int64_t p95_us;
    std::int64_t max_us;
    double loss_fraction;
    std::size_t answered;
    std::size_t timeouts;
  };

  void add_sample(std::uint64_t probe_seq, std::int64_t rtt_us);
  void add_timeout(std::uint64_t probe_seq);

  std::size_t answered() const { return samples_.size(); }
  std::size_t timeouts() const { return timeouts_; }
  std::size_t probes() const { return samples_.size() + timeouts_; }
  double loss_fraction() const;
  const std::vector<RttSample>& samples() const { return samples_; }

  Summary summary() const;  // throws AllProbesLost when nothing was answered

 private:
  std::vector<RttSample> samples_;
  std::size_t timeouts_ = 0;
};

}  // namespace gridbench::measure
