#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gridbench/radio/model.hpp"

namespace gridbench::radio {

struct RadioMetricSample {
  double t_s;
  double rssi_dbm;
  double rsrp_dbm;
  double rsrq_db;
  double sinr_db;
};

struct MetricViolation {
  std::size_t index;
  std::string reason;
};

inline constexpr double kRsrqToleranceDb = 0.5;

// Consistency checks over a measured metric series: RSRP must not exceed
// RSSI, and RSRQ must satisfy RSRQ = 10 log10(N_prb) + RSRP - RSSI within
// the tolerance. N_prb is 100 for a 20 MHz carrier.
std::vector<MetricViolation> validate_metric_series(
    const std::vector<RadioMetricSample>& samples, int n_prb = 100);

}  // namespace gridbench::radio
