#include "gridbench/telemetry/records.hpp"

namespace gridbench::telemetry {

const char* record_kind_name(RecordKind kind) {
  switch (kind) {
    case RecordKind::ArmLog: return "arm_log";
    case RecordKind::CeiAci: return "cei_aci";
    case RecordKind::PqLog: return "pq_log";
  }
  return "unknown";
}

const char* message_class_name(MessageClass cls) {
  switch (cls) {
    case MessageClass::D1: return "D1";
    case MessageClass::D2: return "D2";
    case MessageClass::D3: return "D3";
  }
  return "unknown";
}

namespace {

std::array<std::string, kPqMetricCount> build_pq_names() {
  std::array<std::string, kPqMetricCount> names;
  std::size_t i = 0;
  auto put = [&](std::string n) { names.at(i++) = std::move(n); };

  // CEI-level block, then the two DC inputs.
  put("Active_power_CEI");
  put("Apparent_power_CEI");
  put("Apparent_power_output_RMS_CEI");
  put("Fundamental_Active_power_CEI");
  put("Fundamental_Apparent_power_CEI");
  put("Fundamental_power_factor_CEI");
  put("Fundamental_reactive_power_CEI");
  put("Harmonic_Active_power_CEI");
  put("Harmonic_Apparemt_power_CEI");
  put("Harmonic_distortion_power_CEI");
  put("Harmonic_polution_CEI");
  put("NonActive_power_CEI");
  put("NonFundamental_Apparemt_power_CEI");
  put("Power_factor_CEI");
  put("I_distortion_power_CEI");
  put("V_distortion_power_CEI");
  put("Input_power_DC_FFT");
  put("Input_power_DC_RMS");

  // Per-phase block. The ninth entry is irregular in the source schema:
  // "ective" on phase A, "reActive" on B and C.
  const char* phases[3] = {"A", "B", "C"};
  const char* ninth[3] = {"Fundamental_ective_power_", "Fundamental_reActive_power_",
                          "Fundamental_reActive_power_"};
  for (int p = 0; p < 3; ++p) {
    const std::string s = phases[p];
    put("I_Fundamental_" + s);
    put("U_Fundamental_" + s);
    put("Active_power_" + s);
    put("Apparemt_power_" + s);
    put("Apparemt_power_output_RMS_" + s);
    put("Fundamental_Active_power_" + s);
    put("Fundamental_Apparemt_power_" + s);
    put("Fundamental_power_factor_" + s);
    put(ninth[p] + s);
    put("Harmonic_Active_power_" + s);
    put("Harmonic_Apparemt_power_" + s);
    put("Harmonic_distortion_power_" + s);
    put("Harmonic_polution_" + s);
    put("NonActive_power_" + s);
    put("NonFundamental_Apparemt_power_" + s);
    put("Power_factor_" + s);
    put("I_distortion_power_" + s);
    put("V_distortion_power_" + s);
    put("THDI_" + s);
    put("THDU_" + s);
  }
  return names;
}

}  // namespace

const std::array<std::string, kPqMetricCount>& pq_metric_names() {
  static const std::array<std::string, kPqMetricCount> names = build_pq_names();
  return names;
}

RecordKind record_kind(const TelemetryRecord& record) {
  if (std::holds_alternative<ArmLogRecord>(record)) return RecordKind::ArmLog;
  if (std::holds_alternative<CeiAciRecord>(record)) return RecordKind::CeiAci;
  return RecordKind::PqLog;
}

}  // namespace gridbench::telemetry
