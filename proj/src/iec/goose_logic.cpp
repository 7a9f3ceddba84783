#include "gridbench/iec/goose_logic.hpp"

#include <algorithm>
#include <cmath>

namespace gridbench::iec {

namespace {

bool entries_equal(const std::vector<GooseEntry>& a, const std::vector<GooseEntry>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name) return false;
    if (a[i].value != b[i].value) return false;
  }
  return true;
}

}  // namespace

GooseMessage goose_on_change(const GooseMessage& current,
                             const std::vector<GooseEntry>& new_entries) {
  if (new_entries.empty())
    throw GooseLogicError(GooseLogicErrorCode::EmptyEntrySet,
                          "a publication must carry at least one entry");
  GooseMessage next = current;
  next.entries = new_entries;
  if (entries_equal(current.entries, new_entries)) {
    next.sq_num = current.sq_num + 1;  // u32 wrap is the intended behaviour
  } else {
    next.st_num = current.st_num + 1;
    next.sq_num = 0;
  }
  return next;
}

std::vector<double> goose_retransmission_intervals(const RetransmissionSchedule& sched,
                                                   std::size_t count) {
  if (!(sched.t0_ms > 0.0) || !(sched.multiplier >= 1.0) || !(sched.t0_ms <= sched.tmax_ms))
    throw GooseLogicError(GooseLogicErrorCode::BadRetransmissionParams,
                          "need t0 > 0, multiplier >= 1, t0 <= tmax");
  std::vector<double> gaps;
  gaps.reserve(count);
  double g = sched.t0_ms;
  for (std::size_t k = 0; k < count; ++k) {
    gaps.push_back(std::min(g, sched.tmax_ms));
    g *= sched.multiplier;
    if (g > sched.tmax_ms) g = sched.tmax_ms;  // avoid overflow for long runs
  }
  return gaps;
}

}  // namespace gridbench::iec
