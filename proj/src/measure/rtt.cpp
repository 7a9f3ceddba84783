#include "gridbench/measure/rtt.hpp"

#include <algorithm>
#include <cmath>

namespace gridbench::measure {

std::int64_t nearest_rank_percentile(const std::vector<std::int64_t>& sorted,
                                     double pct) {
  if (sorted.empty())
    throw RttError(RttErrorCode::EmptySamples, "percentile of nothing");
  if (!(pct > 0.0) || pct > 100.0)
    throw RttError(RttErrorCode::BadPercentile, "pct must be in (0, 100]");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  if (rank < 1) rank = 1;
  return sorted[rank - 1];
}

void RttStats::add_sample(std::uint64_t probe_seq, std::int64_t rtt_us) {
  samples_.push_back(RttSample{probe_seq, rtt_us});
}

void RttStats::add_timeout(std::uint64_t) { ++timeouts_; }

double RttStats::loss_fraction() const {
  const std::size_t total = probes();
  if (total == 0) return 0.0;
  return static_cast<double>(timeouts_) / static_cast<double>(total);
}

RttStats::Summary RttStats::summary() const {
  if (samples_.empty())
    throw RttError(RttErrorCode::AllProbesLost, "no probe was answered");
  std::vector<std::int64_t> sorted;
  sorted.reserve(samples_.size());
  for (const RttSample& s : samples_) sorted.push_back(s.rtt_us);
  std::sort(sorted.begin(), sorted.end());

  Summary out{};
  out.min_us = sorted.front();
  out.max_us = sorted.back();
  out.p50_us = nearest_rank_percentile(sorted, 50.0);
  out.p95_us = nearest_rank_percentile(sorted, 95.0);
  double total = 0.0;
  for (std::int64_t v : sorted) total += static_cast<double>(v);
  out.avg_us = total / static_cast<double>(sorted.size());
  out.loss_fraction = loss_fraction();
  out.answered = samples_.size();
  out.timeouts = timeouts_;
  return out;
}

}  // namespace gridbench::measure
