#pragma once

#include <cstdint>
#include <vector>

#include "gridbench/common/result.hpp"

namespace gridbench::measure {

enum class ThroughputErrorCode : std::uint8_t {
  NoCompleteWindow,
  NotSealed,
  OutOfOrderSample,
  BadWindow,
};
using ThroughputError = CodedError<ThroughputErrorCode>;

// Fixed-window byte accounting for one direction of one node. Buckets are
// dense (gaps become zero-byte windows); the summary uses complete windows
// only, so a partial trailing window never biases the average.
class ThroughputSeries {
 public:
  struct Bucket {
    std::int64_t start_us;
    std::uint64_t bytes;
    std::uint64_t frames;
  };

  struct Summary {
    double min_bps;
    double avg_bps;
    double max_bps;
    std::size_t windows;
    std::uint64_t bytes;
  };

  ThroughputSeries(std::int64_t start_us, std::int64_t window_us);

  void add(std::int64_t at_us, std::uint64_t bytes);
  void seal(std::int64_t end_us);

  bool sealed() const { return sealed_; }
  std::int64_t window_us() const { return window_us_; }
  std::int64_t start_us() const { return start_us_; }

  // Buckets for every complete window, zero-filled. Requires seal().
  std::vector<Bucket> complete_buckets() const;
  Summary summary() const;  // throws NoCompleteWindow / NotSealed

 private:
  std::int64_t start_us_;
  std::int64_t window_us_;
  std::int64_t end_us_ = 0;
  bool sealed_ = false;
  std::vector<Bucket> buckets_;  // dense from window 0
};

}  // namespace gridbench::measure
