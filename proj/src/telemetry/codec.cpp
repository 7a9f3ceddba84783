#include "gridbench/telemetry/codec.hpp"

#include "gridbench/common/wire.hpp"
#include "gridbench/telemetry/checksum.hpp"

namespace gridbench::telemetry {


const char* schema_error_name(SchemaError e) {
  switch (e) {
    case SchemaError::TruncatedPayload: return "truncated_payload";
    case SchemaError::UnknownKind: return "unknown_kind";
    case SchemaError::KindMismatch: return "kind_mismatch";
    case SchemaError::SchemaVersionMismatch: return "schema_version_mismatch";
    case SchemaError::BadFieldValue: return "bad_field_value";
    case SchemaError::TrailingBytes: return "trailing_bytes";
    case SchemaError::BadMagic: return "bad_magic";
    case SchemaError::InvalidClass: return "invalid_class";
    case SchemaError::PayloadTooLarge: return "payload_too_large";
  }
  return "unknown";
}

namespace {

void write_prefix(ByteWriter& w, RecordKind kind) {
  w.u8(static_cast<std::uint8_t>(kind));
  w.u8(static_cast<std::uint8_t>(kSchemaVersion.size()));
  w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(kSchemaVersion.data()),
                 kSchemaVersion.size()));
}

}  // namespace

Bytes serialize_record(const TelemetryRecord& record) {
  ByteWriter w;
  if (const auto* arm = std::get_if<ArmLogRecord>(&record)) {
    write_prefix(w, RecordKind::ArmLog);
    w.i64(arm->timestamp_us);
    w.u8(arm->cei_id);
    w.i32(arm->u_dc_mv);
    w.i32(arm->i_dc_ma);
    for (auto v : arm->u_rms_mv) w.i32(v);
    for (auto v : arm->i_rms_ma) w.i32(v);
    for (auto v : arm->s_rms_mva) w.i32(v);
    w.i32(arm->t_igbt_cdeg);
    w.i32(arm->t_ambient_cdeg);
    w.u32(arm->status_flags);
    w.u32(arm->fault_flags);
  } else if (const auto* aci = std::get_if<CeiAciRecord>(&record)) {
    write_prefix(w, RecordKind::CeiAci);
    w.i64(aci->timestamp_us);
    w.u8(aci->cei_id);
    for (auto t : aci->box_temps_cdeg) w.i32(t);
    std::uint8_t relay_bits = 0;
    for (std::size_t i = 0; i < kAciRelayCount; ++i)
      if (aci->relays[i]) relay_bits |= static_cast<std::uint8_t>(1u << i);
    w.u8(relay_bits);
    w.u8(aci->connected ? 1 : 0);
  } else {
    const auto& pq = std::get<PqLogRecord>(record);
    write_prefix(w, RecordKind::PqLog);
    w.i64(pq.timestamp_us);
    w.u8(pq.cei_id);
    w.u16(static_cast<std::uint16_t>(kPqMetricCount));
    for (auto m : pq.metrics) w.i32(m);
  }
  return std::move(w).take();
}

SchemaResult<TelemetryRecord> deserialize_record(RecordKind kind,
                                                 ByteView payload) {
  if (kind != RecordKind::ArmLog && kind != RecordKind::CeiAci &&
      kind != RecordKind::PqLog)
    return Failure<SchemaError>{SchemaError::UnknownKind, "unknown record kind requested"};

  ByteReader r(payload);
  const std::uint8_t kind_byte = r.u8();
  const std::uint8_t ver_len = r.u8();
  if (!r.ok())
    return Failure<SchemaError>{SchemaError::TruncatedPayload, "prefix truncated"};
  if (kind_byte < 1 || kind_byte > 3)
    return Failure<SchemaError>{SchemaError::UnknownKind, "unrecognized kind byte"};
  if (kind_byte != static_cast<std::uint8_t>(kind))
    return Failure<SchemaError>{SchemaError::KindMismatch, "payload kind differs from requested"};
  const std::string ver = r.str(ver_len);
  if (!r.ok())
    return Failure<SchemaError>{SchemaError::TruncatedPayload, "version truncated"};
  if (ver != kSchemaVersion)
    return Failure<SchemaError>{SchemaError::SchemaVersionMismatch, "schema version " + ver};

  TelemetryRecord out;
  switch (kind) {
    case RecordKind::ArmLog: {
      ArmLogRecord arm;
      arm.timestamp_us = r.i64();
      arm.cei_id = r.u8();
      arm.u_dc_mv = r.i32();
      arm.i_dc_ma = r.i32();
      for (auto& v : arm.u_rms_mv) v = r.i32();
      for (auto& v : arm.i_rms_ma) v = r.i32();
      for (auto& v : arm.s_rms_mva) v = r.i32();
      arm.t_igbt_cdeg = r.i32();
      arm.t_ambient_cdeg = r.i32();
      arm.status_flags = r.u32();
      arm.fault_flags = r.u32();
      out = arm;
      break;
    }
    case RecordKind::CeiAci: {
      CeiAciRecord aci;
      aci.timestamp_us = r.i64();
      aci.cei_id = r.u8();
      for (auto& t : aci.box_temps_cdeg) t = r.i32();
      const std::uint8_t relay_bits = r.u8();
      const std::uint8_t connected = r.u8();
      if (r.ok()) {
        if (relay_bits >> kAciRelayCount)
          return Failure<SchemaError>{SchemaError::BadFieldValue, "reserved relay bits set"};
        if (connected > 1)
          return Failure<SchemaError>{SchemaError::BadFieldValue, "connected flag not boolean"};
        for (std::size_t i = 0; i < kAciRelayCount; ++i)
          aci.relays[i] = (relay_bits >> i) & 1u;
        aci.connected = connected == 1;
      }
      out = aci;
      break;
    }
    case RecordKind::PqLog: {
      PqLogRecord pq;
      pq.timestamp_us = r.i64();
      pq.cei_id = r.u8();
      const std::uint16_t count = r.u16();
      if (r.ok() && count != kPqMetricCount)
        return Failure<SchemaError>{SchemaError::BadFieldValue, "unexpected metric count"};
      for (auto& m : pq.metrics) m = r.i32();
      out = pq;
      break;
    }
  }
  if (!r.ok())
    return Failure<SchemaError>{SchemaError::TruncatedPayload, "record body truncated"};
  if (r.remaining() != 0)
    return Failure<SchemaError>{SchemaError::TrailingBytes, "bytes after record body"};

  const std::uint8_t cei = std::visit([](const auto& rec) { return rec.cei_id; }, out);
  if (cei < 1 || cei > 3)
    return Failure<SchemaError>{SchemaError::BadFieldValue, "cei_id out of range"};
  return out;
}

TelemetryEnvelope make_envelope(std::uint8_t source_id, MessageClass cls,
                                std::uint64_t seq, std::int64_t sent_at_us,
                                Bytes payload) {
  TelemetryEnvelope env;
  env.source_id = source_id;
  env.message_class = cls;
  env.seq = seq;
  env.sent_at_us = sent_at_us;
  env.integrity = checksum(as_view(payload));
  env.payload = std::move(payload);
  return env;
}

Bytes encode_envelope(const TelemetryEnvelope& env) {
  ByteWriter w;
  w.u16(kWireMagic);
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(FrameKind::Telemetry));
  w.u8(env.source_id);
  w.u8(static_cast<std::uint8_t>(env.message_class));
  w.u64(env.seq);
  w.i64(env.sent_at_us);
  w.u32(static_cast<std::uint32_t>(env.payload.size()));
  w.u32(env.integrity);
  w.raw(as_view(env.payload));
  return std::move(w).take();
}

SchemaResult<TelemetryEnvelope> decode_envelope(ByteView frame) {
  ByteReader r(frame);
  const std::uint16_t magic = r.u16();
  const std::uint8_t version = r.u8();
  const std::uint8_t kind = r.u8();
  if (!r.ok())
    return Failure<SchemaError>{SchemaError::TruncatedPayload, "preamble truncated"};
  if (magic != kWireMagic || version != kWireVersion ||
      kind != static_cast<std::uint8_t>(FrameKind::Telemetry))
    return Failure<SchemaError>{SchemaError::BadMagic, "not a telemetry frame"};

  TelemetryEnvelope env;
  env.source_id = r.u8();
  const std::uint8_t cls = r.u8();
  env.seq = r.u64();
  env.sent_at_us = r.i64();
  const std::uint32_t payload_len = r.u32();
  env.integrity = r.u32();
  if (!r.ok())
    return Failure<SchemaError>{SchemaError::TruncatedPayload, "header truncated"};
  if (cls < 1 || cls > 3)
    return Failure<SchemaError>{SchemaError::InvalidClass, "message class byte"};
  env.message_class = static_cast<MessageClass>(cls);
  if (payload_len > kMaxEnvelopePayload)
    return Failure<SchemaError>{SchemaError::PayloadTooLarge, "declared payload length"};
  const Bytes body = r.raw(payload_len);
  if (!r.ok())
    return Failure<SchemaError>{SchemaError::TruncatedPayload, "payload truncated"};
  if (r.remaining() != 0)
    return Failure<SchemaError>{SchemaError::TrailingBytes, "bytes after payload"};
  env.payload = body;
  return env;
}

bool integrity_ok(const TelemetryEnvelope& env) {
  return checksum(as_view(env.payload)) == env.integrity;
}

}  // namespace gridbench::telemetry
