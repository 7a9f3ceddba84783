#include "gridbench/radio/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace gridbench::radio {

std::vector<MetricViolation> validate_metric_series(
    const std::vector<RadioMetricSample>& samples, int n_prb) {
  if (n_prb < 1)
    throw RadioError(RadioErrorCode::BadParams, "n_prb must be >= 1");
  std::vector<MetricViolation> violations;
  const double prb_term = 10.0 * std::log10(static_cast<double>(n_prb));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const RadioMetricSample& s = samples[i];
    if (s.rsrp_dbm > s.rssi_dbm)
      violations.push_back(MetricViolation{i, "rsrp exceeds rssi"});
    const double expected_rsrq = prb_term + s.rsrp_dbm - s.rssi_dbm;
    const double deviation = std::fabs(s.rsrq_db - expected_rsrq);
    if (deviation > kRsrqToleranceDb) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "rsrq off identity by %.3f dB", deviation);
      violations.push_back(MetricViolation{i, buf});
    }
  }
  return violations;
}

}  // namespace gridbench::radio
