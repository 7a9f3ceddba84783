#include "gridbench/telemetry/plan.hpp"

#include <string>

namespace gridbench::telemetry {

namespace {

void check_period(std::int64_t period_us, bool allow_any) {
  if (period_us <= 0)
    throw PlanError(PlanErrorCode::PeriodOutOfRange, "period must be positive");
  if (!allow_any && (period_us < kMinReplicationPeriodUs ||
                     period_us > kMaxReplicationPeriodUs))
    throw PlanError(PlanErrorCode::PeriodOutOfRange,
                    "period " + std::to_string(period_us) +
                        " us outside the replication window [1 s, 65 s]");
}

}  // namespace

MessagePlan build_plan(const PlanOptions& options) {
  if (options.sources.empty())
    throw PlanError(PlanErrorCode::NoSources, "plan needs at least one source");
  check_period(options.d1_period_us, options.allow_any_period);
  check_period(options.d2_period_us, options.allow_any_period);
  check_period(options.d3_period_us, options.allow_any_period);

  MessagePlan plan;
  for (std::uint8_t source : options.sources) {
    const struct {
      MessageClass cls;
      RecordKind kind;
      std::int64_t period_us;
    } rows[3] = {
        {MessageClass::D1, options.d1_kind, options.d1_period_us},
        {MessageClass::D2, options.d2_kind, options.d2_period_us},
        {MessageClass::D3, options.d3_kind, options.d3_period_us},
    };
    for (const auto& row : rows) {
      if (options.jitter_us < 0 || options.jitter_us * 2 >= row.period_us)
        throw PlanError(PlanErrorCode::BadJitter, "jitter must be below period/2");
      plan.flows.push_back(FlowSpec{source, row.cls, row.kind, row.period_us,
                                    options.jitter_us});
    }
  }
  return plan;
}

std::vector<std::int64_t> emission_times(const FlowSpec& flow,
                                         std::int64_t duration_us) {
  std::vector<std::int64_t> times;
  if (flow.period_us <= 0)
    throw PlanError(PlanErrorCode::PeriodOutOfRange, "period must be positive");
  for (std::int64_t t = 0; t < duration_us; t += flow.period_us)
    times.push_back(t);
  return times;
}

}  // namespace gridbench::telemetry
