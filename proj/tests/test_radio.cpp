#include <cmath>
#include <vector>

#include "doctest.h"

#include "gridbench/radio/grid.hpp"
#include "gridbench/radio/metrics.hpp"
#include "gridbench/radio/model.hpp"

using namespace gridbench::radio;

namespace {

// Independent FSPL oracle from first principles: 20 log10(4 pi d f / c).
double fspl_oracle_db(double distance_m, double freq_hz) {
  constexpr double c = 299792458.0;
  return 20.0 * std::log10(4.0 * M_PI * distance_m * freq_hz / c);
}

// Absolute tolerance; doctest::Approx is relative-only.
bool near(double a, double b, double abs_tol) {
  return std::fabs(a - b) <= abs_tol;
}

}  // namespace

TEST_CASE("free-space path loss against the first-principles oracle") {
  CHECK(near(fspl_db(1.0, 2350.0), fspl_oracle_db(1.0, 2.35e9), 0.01));
  CHECK(near(fspl_db(1000.0, 2350.0), fspl_oracle_db(1000.0, 2.35e9), 0.01));
  CHECK(near(fspl_db(1000.0, 2350.0), 99.87, 0.01));
  CHECK(near(fspl_db(1.0, 2350.0), 39.87, 0.01));
}

TEST_CASE("link budget: 35 dBm + 4 dBi + 12.5 dBi over 1 km free space") {
  RadioNode bs{"bs", 0, 0, 25.0, 35.0, 4.0, NodeRole::BaseStation};
  RadioNode cpe{"cpe", 1000.0, 0, 3.0, 23.0, 12.5, NodeRole::Cpe};
  PropagationParams fs;
  fs.pathloss_exponent = 2.0;   // free space
  fs.height_gain_coeff = 0.0;
  const double prx = received_power(bs, cpe, fs);
  const double oracle = 35.0 + 4.0 + 12.5 - fspl_oracle_db(1000.0, 2.35e9);
  CHECK(near(prx, oracle, 0.01));
  CHECK(near(prx, -48.37, 0.01));
}

TEST_CASE("thermal noise floor at 20 MHz with a 7 dB noise figure") {
  CHECK(near(noise_floor(20e6, 7.0), -93.9897, 0.001));
  CHECK(near(noise_floor(1.0, 0.0), -174.0, 1e-9));
}

TEST_CASE("log-distance model: doubling distance adds 10 n log10(2)") {
  PropagationParams p;  // n = 3.2
  const double step = path_loss(p, 500.0) - path_loss(p, 250.0);
  CHECK(step == doctest::Approx(32.0 * std::log10(2.0)).epsilon(1e-9));
  const double decade = path_loss(p, 1000.0) - path_loss(p, 100.0);
  CHECK(decade == doctest::Approx(32.0).epsilon(1e-9));
}

TEST_CASE("height gain lowers path loss by hg log10(h_tx h_rx / h_ref^2)") {
  PropagationParams p;  // hg = 10 dB/decade, h_ref = 1 m
  const double flat = path_loss(p, 800.0);
  const double tall = path_loss(p, 800.0, 25.0, 3.0);
  CHECK(flat - tall == doctest::Approx(10.0 * std::log10(75.0)).epsilon(1e-9));
}

TEST_CASE("path loss rejects distances inside the reference radius") {
  PropagationParams p;
  CHECK_THROWS_AS(path_loss(p, 0.5), RadioError);
  CHECK_NOTHROW(path_loss(p, 1.0));
  RadioNode a{"a", 10, 10};
  RadioNode b{"b", 10, 10};
  CHECK_THROWS_AS(received_power(a, b, p), RadioError);
}

TEST_CASE("sinr reduces to snr without interference") {
  CHECK(sinr(-60.0, -94.0) == doctest::Approx(34.0));
  // one interferer exactly at the noise floor costs 3.01 dB
  CHECK(sinr(-60.0, -94.0, {-94.0}) ==
        doctest::Approx(34.0 - 10.0 * std::log10(2.0)).epsilon(1e-9));
}

TEST_CASE("coverage classes: edge strictly below 0 dB, high at threshold") {
  CHECK(coverage_class(-0.001) == CoverageClass::Edge);
  CHECK(coverage_class(-25.0) == CoverageClass::Edge);
  CHECK(coverage_class(0.0) == CoverageClass::Medium);
  CHECK(coverage_class(12.999) == CoverageClass::Medium);
  CHECK(coverage_class(13.0) == CoverageClass::High);
  CHECK(coverage_class(40.0) == CoverageClass::High);
  CHECK(coverage_class(5.0, 5.0) == CoverageClass::High);  // custom threshold
}

TEST_CASE("coverage raster: ceil-counted cells at square centers") {
  RadioNode bs{"bs", 0, 0, 25.0, 35.0, 4.0, NodeRole::BaseStation};
  std::vector<RadioNode> cpes{{"c1", 300.0, 400.0, 3.0, 23.0, 12.5, NodeRole::Cpe}};
  PropagationParams params;
  GridSpec spec;
  spec.extent_x_m = 210.0;  // not a multiple of the resolution
  spec.extent_y_m = 200.0;
  spec.resolution_m = 50.0;

  const CoverageMap map = coverage_grid(bs, cpes, params, spec);
  CHECK(map.nx == 5);  // ceil(210/50)
  CHECK(map.ny == 4);
  REQUIRE(map.cells.size() == 20);
  CHECK(map.cells[0].x_m == doctest::Approx(25.0));
  CHECK(map.cells[0].y_m == doctest::Approx(25.0));
  CHECK(map.cells[1].x_m == doctest::Approx(75.0));  // x inner
  CHECK(map.cells[5].y_m == doctest::Approx(75.0));  // y outer

  // SINR must fall with distance from the base station along a row.
  CHECK(map.cells[0].sinr_db > map.cells[4].sinr_db);

  REQUIRE(map.points.size() == 1);
  CHECK(map.points[0].distance_m == doctest::Approx(500.0));
  const double expected_prx =
      35.0 + 4.0 + 12.5 - path_loss(params, 500.0, 25.0, 3.0);
  CHECK(map.points[0].prx_dbm == doctest::Approx(expected_prx).epsilon(1e-12));

  spec.extent_x_m = 0.0;
  CHECK_THROWS_AS(coverage_grid(bs, cpes, params, spec), RadioError);
}

TEST_CASE("metric series validation holds the rsrq identity within 0.5 dB") {
  std::vector<RadioMetricSample> samples;
  // valid: rsrq = 10 log10(100) + rsrp - rssi = 20 + rsrp - rssi
  samples.push_back({0.0, -60.0, -80.0, 0.0, 20.0});
  samples.push_back({1.0, -61.0, -80.5, 0.5, 19.0});     // off by 0.0 exactly
  samples.push_back({2.0, -60.0, -80.0, 0.49, 20.0});    // inside tolerance
  CHECK(validate_metric_series(samples).empty());

  samples.push_back({3.0, -60.0, -80.0, 0.6, 20.0});     // identity broken
  samples.push_back({4.0, -60.0, -59.0, 21.0, 20.0});    // rsrp above rssi
  const auto violations = validate_metric_series(samples);
  REQUIRE(violations.size() == 2);
  CHECK(violations[0].index == 3);
  CHECK(violations[1].index == 4);
  CHECK(violations[1].reason == "rsrp exceeds rssi");

  CHECK_THROWS_AS(validate_metric_series(samples, 0), RadioError);
}
