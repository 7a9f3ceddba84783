#include "gridbench/radio/grid.hpp"

#include <cmath>

namespace gridbench::radio {

namespace {

double clamped_prx(const RadioNode& bs, const PropagationParams& params,
                   double x, double y, double rx_gain, double rx_height) {
  double d = std::hypot(bs.x_m - x, bs.y_m - y);
  if (d < params.ref_distance_m) d = params.ref_distance_m;
  return bs.tx_power_dbm + bs.antenna_gain_dbi + rx_gain -
         path_loss(params, d, bs.antenna_height_m, rx_height);
}

}  // namespace

CoverageMap coverage_grid(const RadioNode& bs, const std::vector<RadioNode>& cpes,
                          const PropagationParams& params, const GridSpec& spec) {
  if (!(spec.extent_x_m > 0.0) || !(spec.extent_y_m > 0.0))
    throw RadioError(RadioErrorCode::EmptyExtent, "extent must be positive");
  if (!(spec.resolution_m > 0.0))
    throw RadioError(RadioErrorCode::BadParams, "resolution must be positive");

  CoverageMap map;
  map.nx = static_cast<std::size_t>(std::ceil(spec.extent_x_m / spec.resolution_m));
  map.ny = static_cast<std::size_t>(std::ceil(spec.extent_y_m / spec.resolution_m));
  map.cells.reserve(map.nx * map.ny);
  for (std::size_t j = 0; j < map.ny; ++j) {
    const double y = (static_cast<double>(j) + 0.5) * spec.resolution_m;
    for (std::size_t i = 0; i < map.nx; ++i) {
      const double x = (static_cast<double>(i) + 0.5) * spec.resolution_m;
      const double prx = clamped_prx(bs, params, x, y, spec.probe_gain_dbi,
                                     spec.probe_height_m);
      const double s = sinr(prx, spec.noise_dbm);
      map.cells.push_back(
          CoverageCell{x, y, s, coverage_class(s, spec.high_threshold_db)});
    }
  }

  for (const RadioNode& cpe : cpes) {
    double d = std::hypot(bs.x_m - cpe.x_m, bs.y_m - cpe.y_m);
    if (d < params.ref_distance_m) d = params.ref_distance_m;
    const double prx = clamped_prx(bs, params, cpe.x_m, cpe.y_m,
                                   cpe.antenna_gain_dbi, cpe.antenna_height_m);
    const double s = sinr(prx, spec.noise_dbm);
    map.points.push_back(CpePoint{cpe.name, cpe.x_m, cpe.y_m, d, prx, s,
                                  coverage_class(s, spec.high_threshold_db)});
  }
  return map;
}

}  // namespace gridbench::radio
