#pragma once

#include <cstdint>

#include "gridbench/common/result.hpp"
#include "gridbench/telemetry/records.hpp"

namespace gridbench::telemetry {

enum class GeneratorErrorCode : std::uint8_t { UnknownKind, BadSourceId };
using GeneratorError = CodedError<GeneratorErrorCode>;

// Deterministic pseudo-random record for (seed, kind, source, at): the same
// arguments always produce the same values, independent of call order.
// Values stay inside the plant's plausible envelopes (DC bus within
// +10%/-20% of 750 V, temperatures in operating range, and so on).
TelemetryRecord generate_record(RecordKind kind, std::uint8_t source_id,
                                std::int64_t at_us, std::uint64_t seed);

}  // namespace gridbench::telemetry
