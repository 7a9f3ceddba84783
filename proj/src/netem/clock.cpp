#include "gridbench/netem/clock.hpp"

#include <utility>

namespace gridbench::netem {

void VirtualClock::schedule(std::int64_t at_us, Action action) {
  if (at_us < now_)
    throw ClockError(ClockErrorCode::ScheduleInPast, "event before current time");
  queue_.push(Event{at_us, next_seq_++, std::move(action)});
}

void VirtualClock::step() {
  if (queue_.empty())
    throw ClockError(ClockErrorCode::EmptyQueue, "no pending events");
  // Safe: the element is popped before anything else touches the queue.
  Event ev = std::move(const_cast<Event&>(queue_.top()));
  queue_.pop();
  now_ = ev.at_us;
  ev.action();
}

void VirtualClock::run_until(std::int64_t t_us) {
  while (!queue_.empty() && queue_.top().at_us <= t_us) step();
  if (t_us > now_) now_ = t_us;
}

void VirtualClock::run_all() {
  while (!queue_.empty()) step();
}

}  // namespace gridbench::netem
