#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gridbench/common/result.hpp"
#include "gridbench/telemetry/codec.hpp"
#include "gridbench/telemetry/records.hpp"

namespace gridbench::measure {

enum class TransportRole : std::uint8_t { Stream = 1, Datagram = 2 };
const char* transport_role_name(TransportRole role);

struct FlowId {
  std::uint8_t source_id = 1;
  telemetry::MessageClass message_class = telemetry::MessageClass::D1;
  TransportRole role = TransportRole::Stream;
  bool operator==(const FlowId&) const = default;
  auto operator<=>(const FlowId&) const = default;
};

std::string flow_id_label(const FlowId& id);

enum class Classification : std::uint8_t {
  FirstDelivery,
  Duplicate,
  Reordered,  // a first delivery that arrived after a higher seq
  IntegrityFailure,
};

const char* classification_name(Classification c);

enum class LedgerErrorCode : std::uint8_t {
  WrongFlow,
  EmptyFlow,
  SeqJumpTooLarge,
};
using LedgerError = CodedError<LedgerErrorCode>;

// Exact received-seq membership with bounded memory: a sliding bitmap over
// the most recent `window` sequence numbers plus an explicit set of older
// seqs that were never received. Anything below the window that is not in
// the missing set has been received.
class SeqWindow {
 public:
  explicit SeqWindow(std::size_t window = 1u << 16);

  bool test(std::uint64_t seq) const;
  void mark(std::uint64_t seq);

  std::size_t window() const { return window_; }

 private:
  std::size_t window_;
  std::uint64_t base_ = 0;  // bitmap covers [base_, base_ + window_)
  std::vector<std::uint8_t> bits_;
  std::set<std::uint64_t> old_missing_;
};

// Per-flow delivery accounting. Single writer; checksum is verified before
// any sequence bookkeeping so corrupted frames never pollute the seq state.
class FlowLedger {
 public:
  explicit FlowLedger(FlowId id, std::size_t seq_window = 1u << 16);

  void record_tx(const telemetry::TelemetryEnvelope& env);
  Classification record_rx(const telemetry::TelemetryEnvelope& env);

  // (tx - rx_unique) / tx; integrity failures count as lost. Throws
  // EmptyFlow when nothing was transmitted.
  double loss_rate() const;

  const FlowId& id() const { return id_; }
  std::uint64_t tx_count() const { return tx_count_; }
  std::uint64_t rx_events() const { return rx_events_; }
  std::uint64_t rx_unique() const { return rx_unique_; }
  std::uint64_t duplicates() const { return duplicates_; }
  std::uint64_t reorders() const { return reorders_; }
  std::uint64_t integrity_failures() const { return integrity_failures_; }
  bool any_rx() const { return rx_unique_ > 0; }
  std::uint64_t highest_seq_seen() const { return highest_seq_seen_; }

 private:
  FlowId id_;
  SeqWindow window_;
  std::uint64_t tx_count_ = 0;
  std::uint64_t rx_events_ = 0;
  std::uint64_t rx_unique_ = 0;
  std::uint64_t duplicates_ = 0;
  std::uint64_t reorders_ = 0;
  std::uint64_t integrity_failures_ = 0;
  std::uint64_t highest_seq_seen_ = 0;
  bool have_rx_ = false;
};

}  // namespace gridbench::measure
