#include "gridbench/iec/messages.hpp"

#include <algorithm>
#include <unordered_set>

namespace gridbench::iec {

namespace {

bool printable_id(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c >= 0x20 && c != 0x7f;
  });
}

void write_preamble(ByteWriter& w, FrameKind kind) {
  w.u16(kWireMagic);
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(kind));
}

// Returns false on magic/version/kind mismatch; truncation is left to the
// caller's reader.ok() checkpoint.
bool read_preamble(ByteReader& r, FrameKind expected) {
  std::uint16_t magic = r.u16();
  std::uint8_t version = r.u8();
  std::uint8_t kind = r.u8();
  if (!r.ok()) return true;  // defer to TruncatedFrame
  return magic == kWireMagic && version == kWireVersion &&
         kind == static_cast<std::uint8_t>(expected);
}

std::optional<Failure<CodecError>> validate_asdu(const Asdu& a) {
  if (a.sv_id.empty() || !printable_id(a.sv_id))
    return Failure<CodecError>{CodecError::InvariantViolation,
                               "sv_id empty or contains control characters"};
  if (a.sv_id.size() > kMaxSvIdLen)
    return Failure<CodecError>{CodecError::SvIdTooLong,
                               "sv_id exceeds " + std::to_string(kMaxSvIdLen) + " bytes"};
  return std::nullopt;
}

}  // namespace

const char* codec_error_name(CodecError e) {
  switch (e) {
    case CodecError::BadMagic: return "BadMagic";
    case CodecError::TruncatedFrame: return "TruncatedFrame";
    case CodecError::TrailingBytes: return "TrailingBytes";
    case CodecError::InvariantViolation: return "InvariantViolation";
    case CodecError::TooManyAsdus: return "TooManyAsdus";
    case CodecError::EmptyAsduList: return "EmptyAsduList";
    case CodecError::SvIdTooLong: return "SvIdTooLong";
    case CodecError::DuplicateAttribute: return "DuplicateAttribute";
    case CodecError::UnknownTypeTag: return "UnknownTypeTag";
    case CodecError::HopLimitExhausted: return "HopLimitExhausted";
    case CodecError::EmptyEntries: return "EmptyEntries";
  }
  return "?";
}

std::optional<Failure<CodecError>> validate(const SvMessage& msg) {
  if (msg.asdus.empty())
    return Failure<CodecError>{CodecError::EmptyAsduList, "message carries no ASDU"};
  if (msg.asdus.size() > kMaxAsdus)
    return Failure<CodecError>{CodecError::TooManyAsdus,
                               std::to_string(msg.asdus.size()) + " ASDUs, limit 8"};
  std::unordered_set<std::string> ids;
  for (const Asdu& a : msg.asdus) {
    if (auto f = validate_asdu(a)) return f;
    if (!ids.insert(a.sv_id).second)
      return Failure<CodecError>{CodecError::InvariantViolation,
                                 "duplicate sv_id '" + a.sv_id + "'"};
  }
  return std::nullopt;
}

std::optional<Failure<CodecError>> validate(const GooseMessage& msg) {
  if (msg.go_id.empty() || msg.go_id.size() > kMaxGoIdLen || !printable_id(msg.go_id))
    return Failure<CodecError>{CodecError::InvariantViolation, "bad go_id"};
  if (msg.entries.empty())
    return Failure<CodecError>{CodecError::EmptyEntries, "entries must be non-empty"};
  std::unordered_set<std::string> names;
  for (const GooseEntry& e : msg.entries) {
    if (e.name.empty() || e.name.size() > kMaxAttrNameLen || !printable_id(e.name))
      return Failure<CodecError>{CodecError::InvariantViolation,
                                 "bad attribute name '" + e.name + "'"};
    if (!names.insert(e.name).second)
      return Failure<CodecError>{CodecError::DuplicateAttribute,
                                 "duplicate attribute '" + e.name + "'"};
  }
  return std::nullopt;
}

Result<Bytes, CodecError> encode_sv(const SvMessage& msg) {
  if (auto f = validate(msg)) return *f;
  ByteWriter w;
  write_preamble(w, FrameKind::Sv);
  w.u16(msg.app_id);
  w.u8(static_cast<std::uint8_t>(msg.smp_synch));
  w.u32(msg.conf_rev);
  w.u8(static_cast<std::uint8_t>(msg.asdus.size()));
  for (const Asdu& a : msg.asdus) {
    w.u8(static_cast<std::uint8_t>(a.sv_id.size()));
    w.raw(as_view(a.sv_id));
    w.zeros(kMaxSvIdLen - a.sv_id.size());
    w.u16(a.smp_cnt);
    w.u16(a.quality);
    for (std::int32_t m : a.measurements) w.i32(m);
  }
  return std::move(w).take();
}

Result<SvMessage, CodecError> decode_sv(ByteView frame) {
  ByteReader r(frame);
  if (!read_preamble(r, FrameKind::Sv))
    return Failure<CodecError>{CodecError::BadMagic, "not an SV frame"};
  SvMessage msg;
  msg.app_id = r.u16();
  std::uint8_t synch = r.u8();
  msg.conf_rev = r.u32();
  std::uint8_t count = r.u8();
  if (!r.ok())
    return Failure<CodecError>{CodecError::TruncatedFrame, "header truncated"};
  if (synch > 2)
    return Failure<CodecError>{CodecError::InvariantViolation, "bad smp_synch"};
  msg.smp_synch = static_cast<SmpSynch>(synch);
  if (count == 0)
    return Failure<CodecError>{CodecError::EmptyAsduList, "asdu_count is 0"};
  if (count > kMaxAsdus)
    return Failure<CodecError>{CodecError::TooManyAsdus, "asdu_count exceeds 8"};
  msg.asdus.reserve(count);
  for (std::uint8_t i = 0; i < count; ++i) {
    Asdu a;
    std::uint8_t id_len = r.u8();
    if (!r.ok())
      return Failure<CodecError>{CodecError::TruncatedFrame, "ASDU truncated"};
    if (id_len == 0 || id_len > kMaxSvIdLen)
      return Failure<CodecError>{CodecError::InvariantViolation, "bad sv_id length"};
    a.sv_id = r.str(id_len);
    r.skip(kMaxSvIdLen - id_len);
    a.smp_cnt = r.u16();
    a.quality = r.u16();
    for (std::size_t m = 0; m < kMeasurementsPerAsdu; ++m)
      a.measurements[m] = r.i32();
    if (!r.ok())
      return Failure<CodecError>{CodecError::TruncatedFrame, "ASDU truncated"};
    msg.asdus.push_back(std::move(a));
  }
  if (r.remaining() != 0)
    return Failure<CodecError>{CodecError::TrailingBytes,
                               std::to_string(r.remaining()) + " bytes after last ASDU"};
  if (auto f = validate(msg)) return *f;
  return msg;
}

Result<Bytes, CodecError> encode_goose(const GooseMessage& msg) {
  if (auto f = validate(msg)) return *f;
  if (msg.entries.size() > 0xffff)
    return Failure<CodecError>{CodecError::InvariantViolation, "too many entries"};
  ByteWriter w;
  write_preamble(w, FrameKind::Goose);
  w.u8(static_cast<std::uint8_t>(msg.go_id.size()));
  w.raw(as_view(msg.go_id));
  w.u32(msg.st_num);
  w.u32(msg.sq_num);
  w.u32(msg.ttl_ms);
  w.u16(static_cast<std::uint16_t>(msg.entries.size()));
  for (const GooseEntry& e : msg.entries) {
    w.u8(static_cast<std::uint8_t>(e.name.size()));
    w.raw(as_view(e.name));
    if (const bool* b = std::get_if<bool>(&e.value)) {
      w.u8(1);
      w.u8(*b ? 1 : 0);
    } else if (const std::int32_t* i = std::get_if<std::int32_t>(&e.value)) {
      w.u8(2);
      w.i32(*i);
    } else {
      const ScaledValue& s = std::get<ScaledValue>(e.value);
      w.u8(3);
      w.i32(s.value);
      w.u8(static_cast<std::uint8_t>(s.exponent));
    }
  }
  return std::move(w).take();
}

Result<GooseMessage, CodecError> decode_goose(ByteView frame) {
  ByteReader r(frame);
  if (!read_preamble(r, FrameKind::Goose))
    return Failure<CodecError>{CodecError::BadMagic, "not a GOOSE frame"};
  GooseMessage msg;
  std::uint8_t id_len = r.u8();
  if (!r.ok())
    return Failure<CodecError>{CodecError::TruncatedFrame, "header truncated"};
  if (id_len == 0 || id_len > kMaxGoIdLen)
    return Failure<CodecError>{CodecError::InvariantViolation, "bad go_id length"};
  msg.go_id = r.str(id_len);
  msg.st_num = r.u32();
  msg.sq_num = r.u32();
  msg.ttl_ms = r.u32();
  std::uint16_t count = r.u16();
  if (!r.ok())
    return Failure<CodecError>{CodecError::TruncatedFrame, "header truncated"};
  if (count == 0)
    return Failure<CodecError>{CodecError::EmptyEntries, "entry count is 0"};
  msg.entries.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    GooseEntry e;
    std::uint8_t name_len = r.u8();
    if (!r.ok())
      return Failure<CodecError>{CodecError::TruncatedFrame, "entry truncated"};
    if (name_len == 0)
      return Failure<CodecError>{CodecError::InvariantViolation, "empty attribute name"};
    e.name = r.str(name_len);
    std::uint8_t tag = r.u8();
    switch (tag) {
      case 1: {
        std::uint8_t b = r.u8();
        if (r.ok() && b > 1)
          return Failure<CodecError>{CodecError::InvariantViolation, "bad boolean"};
        e.value = (b == 1);
        break;
      }
      case 2:
        e.value = r.i32();
        break;
      case 3: {
        ScaledValue s;
        s.value = r.i32();
        s.exponent = static_cast<std::int8_t>(r.u8());
        e.value = s;
        break;
      }
      default:
        if (!r.ok())
          return Failure<CodecError>{CodecError::TruncatedFrame, "entry truncated"};
        return Failure<CodecError>{CodecError::UnknownTypeTag,
                                   "type tag " + std::to_string(tag)};
    }
    if (!r.ok())
      return Failure<CodecError>{CodecError::TruncatedFrame, "entry truncated"};
    msg.entries.push_back(std::move(e));
  }
  if (r.remaining() != 0)
    return Failure<CodecError>{CodecError::TrailingBytes, "bytes after last entry"};
  if (auto f = validate(msg)) return *f;
  return msg;
}

Result<Bytes, CodecError> wrap_routable(const RoutableHeader& header, ByteView payload) {
  if (header.hop_limit < 1)
    return Failure<CodecError>{CodecError::HopLimitExhausted, "hop_limit must be >= 1 at send"};
  if (header.payload_kind != PayloadKind::Sv && header.payload_kind != PayloadKind::Goose)
    return Failure<CodecError>{CodecError::InvariantViolation, "bad payload kind"};
  ByteWriter w;
  write_preamble(w, FrameKind::Routable);
  w.u32(header.session_id);
  w.u8(header.hop_limit);
  w.u8(static_cast<std::uint8_t>(header.payload_kind));
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.raw(payload);
  return std::move(w).take();
}

namespace {

Result<RoutableFrame, CodecError> parse_routable(ByteView frame) {
  ByteReader r(frame);
  if (!read_preamble(r, FrameKind::Routable))
    return Failure<CodecError>{CodecError::BadMagic, "not a routable frame"};
  RoutableFrame out;
  out.header.session_id = r.u32();
  out.header.hop_limit = r.u8();
  std::uint8_t kind = r.u8();
  std::uint32_t len = r.u32();
  if (!r.ok())
    return Failure<CodecError>{CodecError::TruncatedFrame, "header truncated"};
  if (kind != 1 && kind != 2)
    return Failure<CodecError>{CodecError::InvariantViolation, "bad payload kind"};
  out.header.payload_kind = static_cast<PayloadKind>(kind);
  if (r.remaining() < len)
    return Failure<CodecError>{CodecError::TruncatedFrame, "payload truncated"};
  out.payload = r.raw(len);
  if (r.remaining() != 0)
    return Failure<CodecError>{CodecError::TrailingBytes, "bytes after payload"};
  return out;
}

}  // namespace

Result<RoutableFrame, CodecError> unwrap_routable(ByteView frame) {
  auto parsed = parse_routable(frame);
  if (!parsed) return parsed.failure();
  if (parsed.value().header.hop_limit == 0)
    return Failure<CodecError>{CodecError::HopLimitExhausted, "hop limit reached 0"};
  return parsed;
}

Result<Bytes, CodecError> route_hop(ByteView frame) {
  auto parsed = parse_routable(frame);
  if (!parsed) return parsed.failure();
  const RoutableFrame& f = parsed.value();
  if (f.header.hop_limit <= 1)
    return Failure<CodecError>{CodecError::HopLimitExhausted, "dropped at hop limit"};
  RoutableHeader next = f.header;
  next.hop_limit = static_cast<std::uint8_t>(next.hop_limit - 1);
  return wrap_routable(next, as_view(f.payload));
}

bool topic_match(const std::string& subscription, const std::string& sv_id) {
  return subscription == "*" || subscription == sv_id;
}

}  // namespace gridbench::iec
