#include "gridbench/measure/ledger.hpp"

#include <algorithm>

#include "gridbench/telemetry/checksum.hpp"

namespace gridbench::measure {

const char* transport_role_name(TransportRole role) {
  switch (role) {
    case TransportRole::Stream: return "tcp";
    case TransportRole::Datagram: return "udp";
  }
  return "unknown";
}

const char* classification_name(Classification c) {
  switch (c) {
    case Classification::FirstDelivery: return "first_delivery";
    case Classification::Duplicate: return "duplicate";
    case Classification::Reordered: return "reordered";
    case Classification::IntegrityFailure: return "integrity_failure";
  }
  return "unknown";
}

std::string flow_id_label(const FlowId& id) {
  return "inverter" + std::to_string(id.source_id) + "/" +
         telemetry::message_class_name(id.message_class) + "/" +
         transport_role_name(id.role);
}

SeqWindow::SeqWindow(std::size_t window) : window_(window), bits_(window, 0) {}

bool SeqWindow::test(std::uint64_t seq) const {
  if (seq >= base_ + window_) return false;  // beyond the window: never marked
  if (seq >= base_) return bits_[seq % window_] != 0;
  return old_missing_.count(seq) == 0;
}

void SeqWindow::mark(std::uint64_t seq) {
  if (seq < base_) {
    old_missing_.erase(seq);  // a gap below the window finally filled
    return;
  }
  if (seq >= base_ + window_) {
    const std::uint64_t new_base = seq - window_ + 1;
    // Guard against absurd jumps (attacker-controlled seq in sockets mode):
    // flushing is linear in the jump size, so bound it.
    if (new_base - base_ > (1u << 21))
      throw LedgerError(LedgerErrorCode::SeqJumpTooLarge,
                        "sequence jumped past the trackable window");
    for (std::uint64_t s = base_; s < new_base; ++s) {
      auto& bit = bits_[s % window_];
      if (!bit) old_missing_.insert(s);
      bit = 0;
    }
    base_ = new_base;
  }
  bits_[seq % window_] = 1;
}

FlowLedger::FlowLedger(FlowId id, std::size_t seq_window)
    : id_(id), window_(seq_window) {}

void FlowLedger::record_tx(const telemetry::TelemetryEnvelope& env) {
  if (env.source_id != id_.source_id || env.message_class != id_.message_class)
    throw LedgerError(LedgerErrorCode::WrongFlow,
                      "tx envelope belongs to another flow");
  ++tx_count_;
}

Classification FlowLedger::record_rx(const telemetry::TelemetryEnvelope& env) {
  if (env.source_id != id_.source_id || env.message_class != id_.message_class)
    throw LedgerError(LedgerErrorCode::WrongFlow,
                      "rx envelope belongs to another flow");
  ++rx_events_;
  if (!telemetry::integrity_ok(env)) {
    ++integrity_failures_;
    return Classification::IntegrityFailure;
  }
  const std::uint64_t seq = env.seq;
  if (window_.test(seq)) {
    ++duplicates_;
    return Classification::Duplicate;
  }
  window_.mark(seq);
  ++rx_unique_;
  const bool late = have_rx_ && seq < highest_seq_seen_;
  if (!have_rx_ || seq > highest_seq_seen_) {
    highest_seq_seen_ = seq;
    have_rx_ = true;
  }
  if (late) {
    ++reorders_;
    return Classification::Reordered;
  }
  return Classification::FirstDelivery;
}

double FlowLedger::loss_rate() const {
  if (tx_count_ == 0)
    throw LedgerError(LedgerErrorCode::EmptyFlow, "flow transmitted nothing");
  const double tx = static_cast<double>(tx_count_);
  return (tx - static_cast<double>(rx_unique_)) / tx;
}

}  // namespace gridbench::measure
