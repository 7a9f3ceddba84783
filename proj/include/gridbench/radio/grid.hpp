#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gridbench/radio/model.hpp"

namespace gridbench::radio {

struct CoverageCell {
  double x_m;
  double y_m;
  double sinr_db;
  CoverageClass cls;
};

struct CpePoint {
  std::string name;
  double x_m;
  double y_m;
  double distance_m;
  double prx_dbm;
  double sinr_db;
  CoverageClass cls;
};

struct CoverageMap {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<CoverageCell> cells;  // row-major: y outer, x inner
  std::vector<CpePoint> points;
};

struct GridSpec {
  double extent_x_m = 2000.0;
  double extent_y_m = 2000.0;
  double resolution_m = 50.0;
  double noise_dbm = -93.98970004336019;  // 20 MHz, NF 7 dB
  double probe_gain_dbi = 12.5;           // raster receiver antenna
  double probe_height_m = 3.0;
  double high_threshold_db = kHighSinrDb;
};

// Downlink SINR raster over [0, extent) with cells at the centers of
// resolution-sized squares; distances inside the reference radius are
// clamped to it so the cell containing the base station stays finite.
// Per-CPE rows use each CPE's own gain and height at its exact position.
CoverageMap coverage_grid(const RadioNode& bs, const std::vector<RadioNode>& cpes,
                          const PropagationParams& params, const GridSpec& spec);

}  // namespace gridbench::radio
