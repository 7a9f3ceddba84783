#pragma once

#include <cstdint>
#include <vector>

#include "gridbench/common/result.hpp"
#include "gridbench/iec/messages.hpp"

namespace gridbench::iec {

enum class GooseLogicErrorCode : std::uint8_t {
  EmptyEntrySet,
  BadRetransmissionParams,
};

using GooseLogicError = CodedError<GooseLogicErrorCode>;

// Produce the successor of `current` after a publisher tick. If the new entry
// values differ from the current ones (by name-wise comparison), the state
// number increments (wrapping at 2^32) and the sequence number resets to zero.
// If nothing changed, only the sequence number increments (also wrapping).
GooseMessage goose_on_change(const GooseMessage& current,
                             const std::vector<GooseEntry>& new_entries);

struct RetransmissionSchedule {
  double t0_ms = 4.0;        // first retransmission gap after a state change
  double multiplier = 2.0;   // geometric back-off factor
  double tmax_ms = 1000.0;   // heartbeat ceiling
};

// Gap k (0-based) after a state change: min(t0 * multiplier^k, tmax).
// Throws BadRetransmissionParams unless t0 > 0, multiplier >= 1, t0 <= tmax.
std::vector<double> goose_retransmission_intervals(const RetransmissionSchedule& sched,
                                                   std::size_t count);

}  // namespace gridbench::iec
