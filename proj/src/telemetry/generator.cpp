#include "gridbench/telemetry/generator.hpp"

#include <string>

#include "gridbench/common/rng.hpp"

namespace gridbench::telemetry {

namespace {

// Milli-unit bound per metric index: unit-interval quantities (power factors,
// THD, pollution indices) stay in [0, 1000]; everything else is a power-like
// quantity for a 16 kVA plant.
bool unit_interval_metric(std::size_t index) {
  const std::string& name = pq_metric_names()[index];
  return name.find("factor") != std::string::npos ||
         name.find("polution") != std::string::npos ||
         name.rfind("THD", 0) == 0;
}

ArmLogRecord make_arm(Rng& rng, std::uint8_t source_id, std::int64_t at_us) {
  ArmLogRecord r;
  r.timestamp_us = at_us;
  r.cei_id = source_id;
  // DC bus: 750 V nominal, +10% / -20% operating window.
  r.u_dc_mv = static_cast<std::int32_t>(rng.uniform_int(600'000, 825'000));
  r.i_dc_ma = static_cast<std::int32_t>(rng.uniform_int(0, 21'000));
  for (auto& v : r.u_rms_mv)
    v = static_cast<std::int32_t>(rng.uniform_int(218'500, 241'500));
  for (auto& v : r.i_rms_ma)
    v = static_cast<std::int32_t>(rng.uniform_int(0, 23'000));
  for (auto& v : r.s_rms_mva)
    v = static_cast<std::int32_t>(rng.uniform_int(0, 5'333'000));
  r.t_igbt_cdeg = static_cast<std::int32_t>(rng.uniform_int(2'000, 9'000));
  r.t_ambient_cdeg = static_cast<std::int32_t>(rng.uniform_int(-2'000, 3'500));
  r.status_flags = 0x1u | (static_cast<std::uint32_t>(rng.uniform_int(0, 7)) << 1);
  r.fault_flags = rng.bernoulli(0.01) ? 0x1u : 0x0u;
  return r;
}

CeiAciRecord make_aci(Rng& rng, std::uint8_t source_id, std::int64_t at_us) {
  CeiAciRecord r;
  r.timestamp_us = at_us;
  r.cei_id = source_id;
  for (auto& t : r.box_temps_cdeg)
    t = static_cast<std::int32_t>(rng.uniform_int(1'500, 7'000));
  for (auto& relay : r.relays) relay = rng.bernoulli(0.9);
  r.connected = rng.bernoulli(0.99);
  return r;
}

PqLogRecord make_pq(Rng& rng, std::uint8_t source_id, std::int64_t at_us) {
  PqLogRecord r;
  r.timestamp_us = at_us;
  r.cei_id = source_id;
  for (std::size_t i = 0; i < kPqMetricCount; ++i) {
    if (unit_interval_metric(i))
      r.metrics[i] = static_cast<std::int32_t>(rng.uniform_int(0, 1'000));
    else
      r.metrics[i] = static_cast<std::int32_t>(rng.uniform_int(-16'000'000, 16'000'000));
  }
  return r;
}

}  // namespace

TelemetryRecord generate_record(RecordKind kind, std::uint8_t source_id,
                                std::int64_t at_us, std::uint64_t seed) {
  if (kind != RecordKind::ArmLog && kind != RecordKind::CeiAci &&
      kind != RecordKind::PqLog)
    throw GeneratorError(GeneratorErrorCode::UnknownKind, "unknown record kind");
  if (source_id < 1 || source_id > 3)
    throw GeneratorError(GeneratorErrorCode::BadSourceId, "source_id must be 1..3");

  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(kind), source_id,
                             static_cast<std::uint64_t>(at_us)}));
  switch (kind) {
    case RecordKind::ArmLog: return make_arm(rng, source_id, at_us);
    case RecordKind::CeiAci: return make_aci(rng, source_id, at_us);
    default: return make_pq(rng, source_id, at_us);
  }
}

}  // namespace gridbench::telemetry
