#include "gridbench/radio/model.hpp"

#include <cmath>

namespace gridbench::radio {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double fspl_db(double distance_m, double freq_mhz) {
  if (!(distance_m > 0.0) || !(freq_mhz > 0.0))
    throw RadioError(RadioErrorCode::BadParams, "distance and frequency must be positive");
  return 32.45 + 20.0 * std::log10(freq_mhz) + 20.0 * std::log10(distance_m / 1000.0);
}

double path_loss(const PropagationParams& params, double distance_m,
                 double h_tx_m, double h_rx_m) {
  if (!(params.ref_distance_m > 0.0) || params.pathloss_exponent < 2.0)
    throw RadioError(RadioErrorCode::BadParams, "need d0 > 0 and n >= 2");
  if (!(h_tx_m > 0.0) || !(h_rx_m > 0.0) || !(params.ref_height_m > 0.0))
    throw RadioError(RadioErrorCode::BadParams, "antenna heights must be positive");
  if (distance_m < params.ref_distance_m)
    throw RadioError(RadioErrorCode::DistanceBelowReference,
                     "distance below the model's reference distance");
  const double height_product =
      h_tx_m * h_rx_m / (params.ref_height_m * params.ref_height_m);
  return fspl_db(params.ref_distance_m, params.freq_mhz) +
         10.0 * params.pathloss_exponent *
             std::log10(distance_m / params.ref_distance_m) -
         params.height_gain_coeff * std::log10(height_product);
}

double path_loss(const PropagationParams& params, double distance_m) {
  return path_loss(params, distance_m, params.ref_height_m, params.ref_height_m);
}

double received_power(const RadioNode& tx, const RadioNode& rx,
                      const PropagationParams& params) {
  const double dx = tx.x_m - rx.x_m;
  const double dy = tx.y_m - rx.y_m;
  const double distance = std::hypot(dx, dy);
  if (distance == 0.0)
    throw RadioError(RadioErrorCode::CoincidentNodes, "tx and rx share a position");
  return tx.tx_power_dbm + tx.antenna_gain_dbi + rx.antenna_gain_dbi -
         path_loss(params, distance, tx.antenna_height_m, rx.antenna_height_m);
}

double noise_floor(double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0.0))
    throw RadioError(RadioErrorCode::BadParams, "bandwidth must be positive");
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double sinr(double prx_dbm, double noise_dbm,
            const std::vector<double>& interference_dbm) {
  double denom = db_to_linear(noise_dbm);
  for (double i : interference_dbm) denom += db_to_linear(i);
  return prx_dbm - linear_to_db(denom);
}

const char* coverage_class_name(CoverageClass c) {
  switch (c) {
    case CoverageClass::Edge: return "edge";
    case CoverageClass::Medium: return "medium";
    case CoverageClass::High: return "high";
  }
  return "unknown";
}

CoverageClass coverage_class(double sinr_db, double high_threshold_db) {
  if (sinr_db < kEdgeSinrDb) return CoverageClass::Edge;
  if (sinr_db < high_threshold_db) return CoverageClass::Medium;
  return CoverageClass::High;
}

}  // namespace gridbench::radio
