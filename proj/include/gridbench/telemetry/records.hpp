#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>

namespace gridbench::telemetry {

enum class RecordKind : std::uint8_t { ArmLog = 1, CeiAci = 2, PqLog = 3 };

// The three per-inverter message classes carried by the application phase.
enum class MessageClass : std::uint8_t { D1 = 1, D2 = 2, D3 = 3 };

const char* record_kind_name(RecordKind kind);
const char* message_class_name(MessageClass cls);

inline constexpr std::size_t kPhaseCount = 3;
inline constexpr std::size_t kAciTempCount = 4;   // T_L1, T_L2, T_W1, T_W2
inline constexpr std::size_t kAciRelayCount = 6;  // R1..R6
inline constexpr std::size_t kPqMetricCount = 78;

// Power-quality metric names in database column order; index i names
// PqLogRecord::metrics[i]. Spellings are kept exactly as the source tables
// have them (including "Apparemt", "polution" and the phase-A "ective").
const std::array<std::string, kPqMetricCount>& pq_metric_names();

// Fast sampled electrical state of one inverter.
struct ArmLogRecord {
  std::int64_t timestamp_us = 0;
  std::uint8_t cei_id = 1;  // 1..3
  std::int32_t u_dc_mv = 0;
  std::int32_t i_dc_ma = 0;
  std::array<std::int32_t, kPhaseCount> u_rms_mv{};
  std::array<std::int32_t, kPhaseCount> i_rms_ma{};
  std::array<std::int32_t, kPhaseCount> s_rms_mva{};
  std::int32_t t_igbt_cdeg = 0;  // centi-degrees C
  std::int32_t t_ambient_cdeg = 0;
  std::uint32_t status_flags = 0;
  std::uint32_t fault_flags = 0;
  bool operator==(const ArmLogRecord&) const = default;
};

// Slow housekeeping state of the inverter's ACI box.
struct CeiAciRecord {
  std::int64_t timestamp_us = 0;
  std::uint8_t cei_id = 1;
  std::array<std::int32_t, kAciTempCount> box_temps_cdeg{};
  std::array<bool, kAciRelayCount> relays{};
  bool connected = false;
  bool operator==(const CeiAciRecord&) const = default;
};

// Power-quality snapshot: a fixed, ordered metric vector in milli-units.
struct PqLogRecord {
  std::int64_t timestamp_us = 0;
  std::uint8_t cei_id = 1;
  std::array<std::int32_t, kPqMetricCount> metrics{};
  bool operator==(const PqLogRecord&) const = default;
};

using TelemetryRecord = std::variant<ArmLogRecord, CeiAciRecord, PqLogRecord>;

RecordKind record_kind(const TelemetryRecord& record);

}  // namespace gridbench::telemetry
