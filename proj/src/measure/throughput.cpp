#include "gridbench/measure/throughput.hpp"

#include <algorithm>

namespace gridbench::measure {

ThroughputSeries::ThroughputSeries(std::int64_t start_us, std::int64_t window_us)
    : start_us_(start_us), window_us_(window_us) {
  if (window_us <= 0)
    throw ThroughputError(ThroughputErrorCode::BadWindow, "window must be positive");
}

void ThroughputSeries::add(std::int64_t at_us, std::uint64_t bytes) {
  if (at_us < start_us_)
    throw ThroughputError(ThroughputErrorCode::OutOfOrderSample,
                          "sample before series start");
  const std::size_t idx =
      static_cast<std::size_t>((at_us - start_us_) / window_us_);
  while (buckets_.size() <= idx) {
    const std::int64_t ws =
        start_us_ + static_cast<std::int64_t>(buckets_.size()) * window_us_;
    buckets_.push_back(Bucket{ws, 0, 0});
  }
  buckets_[idx].bytes += bytes;
  buckets_[idx].frames += 1;
}

void ThroughputSeries::seal(std::int64_t end_us) {
  end_us_ = std::max(end_us, start_us_);
  sealed_ = true;
}

std::vector<ThroughputSeries::Bucket> ThroughputSeries::complete_buckets() const {
  if (!sealed_)
    throw ThroughputError(ThroughputErrorCode::NotSealed, "series not sealed");
  const std::size_t complete =
      static_cast<std::size_t>((end_us_ - start_us_) / window_us_);
  std::vector<Bucket> out;
  out.reserve(complete);
  for (std::size_t w = 0; w < complete; ++w) {
    if (w < buckets_.size()) {
      out.push_back(buckets_[w]);
    } else {
      out.push_back(Bucket{
          start_us_ + static_cast<std::int64_t>(w) * window_us_, 0, 0});
    }
  }
  return out;
}

ThroughputSeries::Summary ThroughputSeries::summary() const {
  const std::vector<Bucket> windows = complete_buckets();
  if (windows.empty())
    throw ThroughputError(ThroughputErrorCode::NoCompleteWindow,
                          "run shorter than one window");
  const double window_s = static_cast<double>(window_us_) / 1e6;
  Summary s{};
  s.windows = windows.size();
  s.min_bps = 8.0 * static_cast<double>(windows[0].bytes) / window_s;
  s.max_bps = s.min_bps;
  double total_bps = 0.0;
  for (const Bucket& b : windows) {
    const double bps = 8.0 * static_cast<double>(b.bytes) / window_s;
    s.min_bps = std::min(s.min_bps, bps);
    s.max_bps = std::max(s.max_bps, bps);
    total_bps += bps;
    s.bytes += b.bytes;
  }
  s.avg_bps = total_bps / static_cast<double>(windows.size());
  return s;
}

}  // namespace gridbench::measure
