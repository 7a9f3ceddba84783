#pragma once

#include <cstdint>
#include <vector>

#include "gridbench/common/result.hpp"
#include "gridbench/telemetry/records.hpp"

namespace gridbench::telemetry {

enum class PlanErrorCode : std::uint8_t { PeriodOutOfRange, BadJitter, NoSources };
using PlanError = CodedError<PlanErrorCode>;

struct FlowSpec {
  std::uint8_t source_id = 1;
  MessageClass message_class = MessageClass::D1;
  RecordKind kind = RecordKind::ArmLog;
  std::int64_t period_us = 1'000'000;
  std::int64_t jitter_us = 0;  // half-width; must stay below period/2
  bool operator==(const FlowSpec&) const = default;
};

struct MessagePlan {
  std::vector<FlowSpec> flows;
};

struct PlanOptions {
  std::vector<std::uint8_t> sources{1, 2, 3};
  RecordKind d1_kind = RecordKind::ArmLog;
  RecordKind d2_kind = RecordKind::PqLog;
  RecordKind d3_kind = RecordKind::CeiAci;
  std::int64_t d1_period_us = 1'000'000;    // fast electrical snapshot
  std::int64_t d2_period_us = 16'000'000;   // power-quality interval
  std::int64_t d3_period_us = 65'000'000;   // slow housekeeping
  std::int64_t jitter_us = 0;
  // The replication window confines periods to [1 s, 65 s]; campaigns that
  // want unusual rates must opt out explicitly.
  bool allow_any_period = false;
};

inline constexpr std::int64_t kMinReplicationPeriodUs = 1'000'000;
inline constexpr std::int64_t kMaxReplicationPeriodUs = 65'000'000;

// Expands options into one FlowSpec per (source, class). Throws PlanError.
MessagePlan build_plan(const PlanOptions& options);

// Scheduled emission instants k * period for k = 0, 1, ... strictly below
// duration_us. Jitter is applied later, at enqueue time, by the campaign.
std::vector<std::int64_t> emission_times(const FlowSpec& flow,
                                         std::int64_t duration_us);

}  // namespace gridbench::telemetry
