#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridbench/common/result.hpp"

namespace gridbench::radio {

enum class RadioErrorCode : std::uint8_t {
  DistanceBelowReference,
  CoincidentNodes,
  BadParams,
  EmptyExtent,
};
using RadioError = CodedError<RadioErrorCode>;

enum class NodeRole : std::uint8_t { BaseStation, Cpe };

struct RadioNode {
  std::string name;
  double x_m = 0.0;
  double y_m = 0.0;
  double antenna_height_m = 3.0;
  double tx_power_dbm = 23.0;
  double antenna_gain_dbi = 12.5;
  NodeRole role = NodeRole::Cpe;
};

// Log-distance path loss with a height-gain correction — the simplest form
// that depends on transmit power, antenna gains, and antenna heights.
struct PropagationParams {
  double freq_mhz = 2350.0;       // band-40 center
  double ref_distance_m = 1.0;
  double pathloss_exponent = 3.2; // forested rural terrain
  double height_gain_coeff = 10.0; // dB per decade of (h_tx*h_rx)/h_ref^2
  double ref_height_m = 1.0;
};

double db_to_linear(double db);
double linear_to_db(double linear);

// Free-space path loss: 32.45 + 20 log10(f_MHz) + 20 log10(d_km).
double fspl_db(double distance_m, double freq_mhz);

// PL = FSPL(d0, f) + 10 n log10(d/d0) - hg log10(h_tx h_rx / h_ref^2).
// Heights default to the reference height (zero height term).
// Throws DistanceBelowReference when distance < d0.
double path_loss(const PropagationParams& params, double distance_m,
                 double h_tx_m, double h_rx_m);
double path_loss(const PropagationParams& params, double distance_m);

// Prx = tx_power + tx_gain + rx_gain - path_loss(distance, heights).
double received_power(const RadioNode& tx, const RadioNode& rx,
                      const PropagationParams& params);

// Thermal noise: -174 dBm/Hz + 10 log10(BW) + NF.
double noise_floor(double bandwidth_hz, double noise_figure_db);

// prx - 10 log10(10^(noise/10) + sum 10^(i/10)); no interference -> SNR.
double sinr(double prx_dbm, double noise_dbm,
            const std::vector<double>& interference_dbm = {});

enum class CoverageClass : std::uint8_t { Edge, Medium, High };
const char* coverage_class_name(CoverageClass c);

inline constexpr double kEdgeSinrDb = 0.0;
inline constexpr double kHighSinrDb = 13.0;

// Edge below 0 dB; High at or above the (configurable) high threshold.
CoverageClass coverage_class(double sinr_db, double high_threshold_db = kHighSinrDb);

}  // namespace gridbench::radio
