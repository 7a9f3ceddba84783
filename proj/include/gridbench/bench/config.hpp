#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridbench/common/result.hpp"
#include "gridbench/netem/profile.hpp"
#include "gridbench/radio/grid.hpp"
#include "gridbench/radio/model.hpp"
#include "gridbench/telemetry/plan.hpp"

namespace gridbench::bench {

enum class ConfigError : std::uint8_t {
  SyntaxError,
  UnknownKey,
  InvalidValue,
  MissingRequired,
};
const char* config_error_name(ConfigError e);

enum class Backend : std::uint8_t { Virtual, Sockets };
enum class Scenario : std::uint8_t { Isolated, Simultaneous };
enum class Direction : std::uint8_t { Up, Down, Both };
enum class TransportChoice : std::uint8_t { Tcp, Udp, Both };

const char* backend_name(Backend b);
const char* scenario_name(Scenario s);
const char* direction_name(Direction d);
const char* transport_choice_name(TransportChoice t);

struct NodeConfig {
  std::string name;
  bool is_hub = false;
  std::uint8_t source_id = 0;  // 0: node emits no telemetry flows
  // Radio placement; defaults differ by role (mast vs CPE terminal).
  double x_m = 0.0;
  double y_m = 0.0;
  double antenna_height_m = 3.0;
  double tx_power_dbm = 23.0;
  double antenna_gain_dbi = 12.5;
  netem::LinkProfile profile;  // ignored for the hub
};

struct ProbePlan {
  std::uint64_t count = 1000;
  double interval_ms = 20.0;
  std::uint16_t pad_bytes = 64;
  double timeout_ms = 1000.0;
};

struct ThroughputPlan {
  double duration_s = 10.0;
  std::size_t datagram_bytes = 1024;
  Direction directions = Direction::Both;
};

struct RadioPlan {
  bool enabled = false;
  radio::PropagationParams params;
  double bandwidth_mhz = 20.0;
  double noise_figure_db = 7.0;
  radio::GridSpec grid;  // noise_dbm recomputed from the two fields above
};

// Optional CI gate: the run exits nonzero when any bound is violated.
struct Thresholds {
  std::optional<double> stream_loss_max_pct;
  std::optional<double> datagram_loss_max_pct;
  std::optional<double> rtt_avg_min_ms;
  std::optional<double> rtt_avg_max_ms;
  std::optional<double> throughput_min_fraction;  // of the shaped link rate
};

struct CampaignConfig {
  std::uint64_t seed = 1;
  Backend backend = Backend::Virtual;
  Scenario scenario = Scenario::Simultaneous;
  double app_duration_s = 130.0;
  bool phase_throughput = true;
  bool phase_echo = true;
  bool phase_app = true;
  double cell_pool_up_bps = 0.0;  // 0: no shared uplink pool
  bool trace = false;
  TransportChoice transport = TransportChoice::Both;
  telemetry::PlanOptions plan;  // sources mirror the nodes' source_ids
  std::vector<NodeConfig> nodes;  // file order; exactly one hub
  ProbePlan probe;
  ThroughputPlan throughput;
  RadioPlan radio;
  Thresholds thresholds;
};

// Strict parse of the line-oriented section/key=value format (grammar in
// docs/config.md). Unknown sections and keys are rejected; all semantic
// checks (duplicate nodes, role counts, ranges) happen here, not at run time.
Result<CampaignConfig, ConfigError> parse_config(const std::string& text);

const NodeConfig& hub_node(const CampaignConfig& config);
std::vector<const NodeConfig*> cpe_nodes(const CampaignConfig& config);

}  // namespace gridbench::bench
