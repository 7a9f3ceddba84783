#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "gridbench/common/result.hpp"

namespace gridbench::netem {

enum class ClockErrorCode : std::uint8_t { EmptyQueue, ScheduleInPast };
using ClockError = CodedError<ClockErrorCode>;

// Discrete-event clock in integer microseconds. Events with equal timestamps
// fire in insertion order, which pins the whole emulation to a single
// deterministic schedule for a given seed and configuration.
class VirtualClock {
 public:
  using Action = std::function<void()>;

  std::int64_t now_us() const { return now_; }
  std::size_t pending() const { return queue_.size(); }

  void schedule(std::int64_t at_us, Action action);

  // Fires the earliest pending event. Throws EmptyQueue when none is left.
  void step();

  // Fires every event with timestamp <= t_us, then advances now to t_us.
  void run_until(std::int64_t t_us);

  // Drains the queue completely (events may schedule further events).
  void run_all();

 private:
  struct Event {
    std::int64_t at_us;
    std::uint64_t seq;  // insertion tiebreak
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at_us != b.at_us) return a.at_us > b.at_us;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::int64_t now_ = 0;
  std::uint64_t next_seq_ = 0;
};

}  // namespace gridbench::netem
