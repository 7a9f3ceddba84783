#pragma once

#include <string>
#include <vector>

#include "gridbench/bench/campaign.hpp"
#include "gridbench/radio/grid.hpp"

namespace gridbench::bench {

enum class ReportError : std::uint8_t { IoError };
using ReportWriteError = CodedError<ReportError>;

// Renderers are pure: same report -> same bytes. Wall-clock time is
// deliberately absent from all of them (docs/reports.md fixes the schemas).
std::string render_summary(const CampaignReport& report);
std::string render_ledgers_csv(const CampaignReport& report);
std::string render_throughput_csv(const CampaignReport& report);
std::string render_rtt_csv(const CampaignReport& report);
std::string render_json(const CampaignReport& report);
std::string render_trace_csv(const netem::TraceSink& trace);

std::string render_coverage_raster_csv(const radio::CoverageMap& map);
std::string render_coverage_points_csv(const radio::CoverageMap& map);

// Writes summary.txt, ledgers.csv, throughput.csv, rtt.csv, report.json
// (plus trace.csv when the report carries a trace) into out_dir, creating
// it if needed. Returns the paths written. Throws ReportWriteError{IoError}.
std::vector<std::string> emit_report(const CampaignReport& report,
                                     const std::string& out_dir);

}  // namespace gridbench::bench
