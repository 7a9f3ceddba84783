#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gridbench/common/bytes.hpp"
#include "gridbench/common/result.hpp"
#include "gridbench/common/wire.hpp"

namespace gridbench::iec {

inline constexpr std::size_t kMaxAsdus = 8;
inline constexpr std::size_t kMaxSvIdLen = 32;
inline constexpr std::size_t kMaxGoIdLen = 64;
inline constexpr std::size_t kMaxAttrNameLen = 64;
inline constexpr std::size_t kMeasurementsPerAsdu = 8;

// Fixed block sizes of the published layout (docs/wire-format.md).
inline constexpr std::size_t kSvHeaderLen = 12;      // preamble + app_id + smp_synch + conf_rev + count
inline constexpr std::size_t kAsduBlockLen = 69;     // id_len + id[32] + smp_cnt + quality + 8*i32
inline constexpr std::size_t kRoutableHeaderLen = 14;

enum class SmpSynch : std::uint8_t { None = 0, Local = 1, Global = 2 };

/// One per-source measurement unit: three phase currents (mA), three phase
/// voltages (mV), neutral current (mA), neutral voltage (mV).
struct Asdu {
  std::string sv_id;
  std::uint16_t smp_cnt = 0;
  std::array<std::int32_t, kMeasurementsPerAsdu> measurements{};
  std::uint16_t quality = 0;  // 8 x 2-bit codes, code i in bits [2i, 2i+1]

  std::uint8_t quality_code(std::size_t i) const {
    return static_cast<std::uint8_t>((quality >> (2 * i)) & 0x3);
  }
  void set_quality_code(std::size_t i, std::uint8_t code) {
    quality = static_cast<std::uint16_t>(
        (quality & ~(0x3u << (2 * i))) | ((code & 0x3u) << (2 * i)));
  }

  bool operator==(const Asdu&) const = default;
};

struct SvMessage {
  std::uint16_t app_id = 0;
  SmpSynch smp_synch = SmpSynch::None;
  std::uint32_t conf_rev = 0;
  std::vector<Asdu> asdus;

  bool operator==(const SvMessage&) const = default;
};

/// Fixed-point value: value * 10^exponent.
struct ScaledValue {
  std::int32_t value = 0;
  std::int8_t exponent = 0;

  bool operator==(const ScaledValue&) const = default;
};

using GooseValue = std::variant<bool, std::int32_t, ScaledValue>;

struct GooseEntry {
  std::string name;
  GooseValue value;

  bool operator==(const GooseEntry&) const = default;
};

struct GooseMessage {
  std::string go_id;
  std::uint32_t st_num = 0;
  std::uint32_t sq_num = 0;
  std::uint32_t ttl_ms = 0;
  std::vector<GooseEntry> entries;

  bool operator==(const GooseMessage&) const = default;
};

enum class PayloadKind : std::uint8_t { Sv = 1, Goose = 2 };

struct RoutableHeader {
  std::uint32_t session_id = 0;
  std::uint8_t hop_limit = 1;
  PayloadKind payload_kind = PayloadKind::Sv;

  bool operator==(const RoutableHeader&) const = default;
};

struct RoutableFrame {
  RoutableHeader header;
  Bytes payload;

  bool operator==(const RoutableFrame&) const = default;
};

enum class CodecError {
  BadMagic,
  TruncatedFrame,
  TrailingBytes,
  InvariantViolation,
  TooManyAsdus,
  EmptyAsduList,
  SvIdTooLong,
  DuplicateAttribute,
  UnknownTypeTag,
  HopLimitExhausted,
  EmptyEntries,
};

const char* codec_error_name(CodecError e);

/// nullopt when the message satisfies all invariants.
std::optional<Failure<CodecError>> validate(const SvMessage& msg);
std::optional<Failure<CodecError>> validate(const GooseMessage& msg);

Result<Bytes, CodecError> encode_sv(const SvMessage& msg);
Result<SvMessage, CodecError> decode_sv(ByteView frame);

Result<Bytes, CodecError> encode_goose(const GooseMessage& msg);
Result<GooseMessage, CodecError> decode_goose(ByteView frame);

Result<Bytes, CodecError> wrap_routable(const RoutableHeader& header, ByteView payload);
Result<RoutableFrame, CodecError> unwrap_routable(ByteView frame);

/// One routed hop: decrements hop_limit in place. HopLimitExhausted means the
/// router drops the frame (the decrement reached 0, or it already was 0).
Result<Bytes, CodecError> route_hop(ByteView frame);

/// Literal match, or the single wildcard "*" which accepts every topic.
bool topic_match(const std::string& subscription, const std::string& sv_id);

}  // namespace gridbench::iec
