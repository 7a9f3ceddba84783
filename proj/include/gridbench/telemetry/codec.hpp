#pragma once

#include <cstdint>
#include <string_view>

#include "gridbench/common/bytes.hpp"
#include "gridbench/common/result.hpp"
#include "gridbench/telemetry/records.hpp"

namespace gridbench::telemetry {

inline constexpr std::string_view kSchemaVersion = "v1";

// Record payloads open with: kind u8, version-length u8, version bytes.
inline constexpr std::size_t kRecordPrefixLen = 2 + kSchemaVersion.size();
inline constexpr std::size_t kArmLogPayloadLen = kRecordPrefixLen + 69;
inline constexpr std::size_t kCeiAciPayloadLen = kRecordPrefixLen + 27;
inline constexpr std::size_t kPqLogPayloadLen =
    kRecordPrefixLen + 11 + 4 * kPqMetricCount;

// Envelope wire header: preamble (4) + source u8 + class u8 + seq u64 +
// sent_at i64 + payload_len u32 + integrity u32.
inline constexpr std::size_t kEnvelopeHeaderLen = 30;
inline constexpr std::size_t kMaxEnvelopePayload = 1u << 20;

enum class SchemaError : std::uint8_t {
  TruncatedPayload,
  UnknownKind,
  KindMismatch,
  SchemaVersionMismatch,
  BadFieldValue,
  TrailingBytes,
  BadMagic,
  InvalidClass,
  PayloadTooLarge,
};

const char* schema_error_name(SchemaError e);

template <typename T>
using SchemaResult = Result<T, SchemaError>;

// One telemetry message as it travels: typed addressing plus an opaque
// serialized record and a checksum computed over exactly those bytes.
struct TelemetryEnvelope {
  std::uint8_t source_id = 1;
  MessageClass message_class = MessageClass::D1;
  std::uint64_t seq = 0;
  std::int64_t sent_at_us = 0;
  Bytes payload;
  std::uint32_t integrity = 0;
  bool operator==(const TelemetryEnvelope&) const = default;
};

Bytes serialize_record(const TelemetryRecord& record);
SchemaResult<TelemetryRecord> deserialize_record(RecordKind kind,
                                                 ByteView payload);

TelemetryEnvelope make_envelope(std::uint8_t source_id, MessageClass cls,
                                std::uint64_t seq, std::int64_t sent_at_us,
                                Bytes payload);

Bytes encode_envelope(const TelemetryEnvelope& env);
// Does not verify integrity: the receiver classifies mismatches, so the
// stored checksum is surfaced as-is. Use integrity_ok() to check.
SchemaResult<TelemetryEnvelope> decode_envelope(ByteView frame);

bool integrity_ok(const TelemetryEnvelope& env);

}  // namespace gridbench::telemetry
