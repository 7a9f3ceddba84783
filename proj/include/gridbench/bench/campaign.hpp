#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridbench/bench/config.hpp"
#include "gridbench/measure/ledger.hpp"
#include "gridbench/measure/rtt.hpp"
#include "gridbench/measure/throughput.hpp"
#include "gridbench/netem/link.hpp"
#include "gridbench/radio/grid.hpp"

namespace gridbench::bench {

enum class CampaignError : std::uint8_t { BackendUnavailable };
using CampaignRunError = CodedError<CampaignError>;

struct ThroughputRow {
  std::string node;
  Direction direction = Direction::Up;  // Up or Down, never Both
  double shaped_rate_bps = 0.0;         // effective link rate in the segment
  measure::ThroughputSeries series;     // sealed
};

struct RttRow {
  std::string node;
  measure::RttStats stats;
};

struct CampaignReport {
  CampaignConfig config;
  std::uint64_t seed = 0;
  std::int64_t virtual_end_us = 0;  // 0 on the sockets backend
  double wall_seconds = 0.0;        // stdout only; never written to files
  std::vector<ThroughputRow> throughput;
  std::vector<RttRow> rtt;
  std::vector<measure::FlowLedger> ledgers;  // config order x class x role
  std::vector<radio::CpePoint> coverage;
  netem::TraceSink trace;                  // populated when config.trace
  std::vector<std::string> flow_errors;    // embedded, never aborting
  std::vector<std::string> violations;     // threshold violations (CI gate)
};

// Executes throughput -> echo -> application on the configured backend.
// Throws CampaignRunError{BackendUnavailable} when sockets cannot bind;
// per-flow trouble lands in report.flow_errors instead of aborting.
CampaignReport run_campaign(const CampaignConfig& config);

// Downlink coverage for the config's radio section and node positions;
// shared by run_campaign and the coverage subcommand.
radio::CoverageMap campaign_coverage(const CampaignConfig& config);

}  // namespace gridbench::bench
