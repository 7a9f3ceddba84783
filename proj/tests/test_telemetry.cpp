#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/crc_ref.hpp"
#include "support/gen.hpp"

#include "gridbench/telemetry/checksum.hpp"
#include "gridbench/telemetry/codec.hpp"
#include "gridbench/telemetry/generator.hpp"
#include "gridbench/telemetry/records.hpp"

using namespace gridbench;
using namespace gridbench::telemetry;

TEST_CASE("crc32 check vector and empty input") {
  const char* v = "123456789";
  Bytes b(v, v + 9);
  CHECK(checksum(as_view(b)) == 0xCBF43926u);
  CHECK(checksum(ByteView{}) == 0u);
}

TEST_CASE("crc32 matches a bit-serial reference on random buffers") {
  Rng rng(0xC0FFEEu);
  for (int i = 0; i < 2000; ++i) {
    const Bytes b = testsupport::gen_bytes(rng, 512);
    CHECK(checksum(as_view(b)) == testsupport::crc32_bitwise(b.data(), b.size()));
  }
}

TEST_CASE("serialized record payload lengths are fixed per kind") {
  CHECK(kArmLogPayloadLen == 73);
  CHECK(kCeiAciPayloadLen == 31);
  CHECK(kPqLogPayloadLen == 327);
  CHECK(serialize_record(ArmLogRecord{}).size() == kArmLogPayloadLen);
  CHECK(serialize_record(CeiAciRecord{}).size() == kCeiAciPayloadLen);
  CHECK(serialize_record(PqLogRecord{}).size() == kPqLogPayloadLen);
}

TEST_CASE("pq metric schema: 78 unique names with the source spellings") {
  const auto& names = pq_metric_names();
  REQUIRE(names.size() == kPqMetricCount);
  std::set<std::string> unique(names.begin(), names.end());
  CHECK(unique.size() == kPqMetricCount);

  CHECK(names[0] == "Active_power_CEI");
  CHECK(names[8] == "Harmonic_Apparemt_power_CEI");
  CHECK(names[10] == "Harmonic_polution_CEI");
  CHECK(names[17] == "Input_power_DC_RMS");
  CHECK(names[18] == "I_Fundamental_A");
  // The irregular ninth per-phase column: "ective" on A, "reActive" on B/C.
  CHECK(names[18 + 8] == "Fundamental_ective_power_A");
  CHECK(names[18 + 20 + 8] == "Fundamental_reActive_power_B");
  CHECK(names[18 + 40 + 8] == "Fundamental_reActive_power_C");
  CHECK(names[77] == "THDU_C");
}

TEST_CASE("record roundtrips across all kinds") {
  Rng rng(20260817);
  for (int i = 0; i < 1000; ++i) {
    const TelemetryRecord rec = testsupport::gen_record(rng);
    const RecordKind kind = record_kind(rec);
    const Bytes payload = serialize_record(rec);
    auto back = deserialize_record(kind, as_view(payload));
    REQUIRE(back.ok());
    CHECK(back.value() == rec);
  }
}

TEST_CASE("deserializer rejects malformed payloads with typed errors") {
  const Bytes good = serialize_record(ArmLogRecord{.cei_id = 2});
  SUBCASE("truncation") {
    Bytes cut(good.begin(), good.end() - 1);
    auto r = deserialize_record(RecordKind::ArmLog, as_view(cut));
    REQUIRE(!r.ok());
    CHECK(r.error() == SchemaError::TruncatedPayload);
  }
  SUBCASE("trailing bytes") {
    Bytes fat = good;
    fat.push_back(0);
    auto r = deserialize_record(RecordKind::ArmLog, as_view(fat));
    REQUIRE(!r.ok());
    CHECK(r.error() == SchemaError::TrailingBytes);
  }
  SUBCASE("kind mismatch") {
    auto r = deserialize_record(RecordKind::CeiAci, as_view(good));
    REQUIRE(!r.ok());
    CHECK(r.error() == SchemaError::KindMismatch);
  }
  SUBCASE("cei_id out of range") {
    Bytes payload = serialize_record(ArmLogRecord{.cei_id = 9});
    auto r = deserialize_record(RecordKind::ArmLog, as_view(payload));
    REQUIRE(!r.ok());
    CHECK(r.error() == SchemaError::BadFieldValue);
  }
}

TEST_CASE("envelope roundtrip preserves every field and the checksum") {
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const TelemetryEnvelope env = testsupport::gen_envelope(rng);
    CHECK(integrity_ok(env));
    auto back = decode_envelope(as_view(encode_envelope(env)));
    REQUIRE(back.ok());
    CHECK(back.value() == env);
    CHECK(integrity_ok(back.value()));
  }
}

TEST_CASE("payload corruption decodes but fails the integrity check") {
  Rng rng(7);
  const TelemetryEnvelope env = testsupport::gen_envelope(rng);
  Bytes frame = encode_envelope(env);
  frame[frame.size() - 3] ^= 0x40;  // inside the payload
  auto back = decode_envelope(as_view(frame));
  REQUIRE(back.ok());
  CHECK(!integrity_ok(back.value()));
}

TEST_CASE("envelope decode rejects structural damage") {
  Rng rng(8);
  Bytes frame = encode_envelope(testsupport::gen_envelope(rng));
  SUBCASE("bad magic") {
    frame[0] ^= 0xFF;
    auto r = decode_envelope(as_view(frame));
    REQUIRE(!r.ok());
    CHECK(r.error() == SchemaError::BadMagic);
  }
  SUBCASE("truncated header") {
    frame.resize(kEnvelopeHeaderLen - 1);
    auto r = decode_envelope(as_view(frame));
    REQUIRE(!r.ok());
    CHECK(r.error() == SchemaError::TruncatedPayload);
  }
  SUBCASE("trailing bytes") {
    frame.push_back(0);
    auto r = decode_envelope(as_view(frame));
    REQUIRE(!r.ok());
    CHECK(r.error() == SchemaError::TrailingBytes);
  }
}

TEST_CASE("generated records are deterministic in (seed, kind, source, at)") {
  const auto a = generate_record(RecordKind::ArmLog, 2, 1'000'000, 42);
  const auto b = generate_record(RecordKind::PqLog, 1, 5, 42);  // interleave
  const auto c = generate_record(RecordKind::ArmLog, 2, 1'000'000, 42);
  CHECK(a == c);
  CHECK(b == generate_record(RecordKind::PqLog, 1, 5, 42));
  CHECK(a != generate_record(RecordKind::ArmLog, 2, 1'000'000, 43));
  CHECK(a != generate_record(RecordKind::ArmLog, 3, 1'000'000, 42));
}

TEST_CASE("generated values stay inside the plant envelopes") {
  for (int i = 0; i < 500; ++i) {
    const auto rec = generate_record(RecordKind::ArmLog, 1, i * 1000, 123);
    const auto& arm = std::get<ArmLogRecord>(rec);
    CHECK(arm.u_dc_mv >= 600'000);   // 750 V nominal, -20%
    CHECK(arm.u_dc_mv <= 825'000);   // +10%
    CHECK(arm.timestamp_us == i * 1000);
    CHECK(arm.cei_id == 1);
  }
}

TEST_CASE("generator rejects unknown kinds and bad sources") {
  CHECK_THROWS_AS(generate_record(static_cast<RecordKind>(77), 1, 0, 1),
                  GeneratorError);
  CHECK_THROWS_AS(generate_record(RecordKind::ArmLog, 0, 0, 1), GeneratorError);
  CHECK_THROWS_AS(generate_record(RecordKind::ArmLog, 4, 0, 1), GeneratorError);
}

TEST_CASE("envelope fuzz smoke: mutated frames never abort") {
  Rng rng(0xABCDu);
  int rejected = 0, corrupt = 0;
  for (int i = 0; i < 20000; ++i) {
    Bytes frame = i % 2 == 0
                      ? testsupport::gen_bytes(rng, 400)
                      : testsupport::mutate(
                            rng, encode_envelope(testsupport::gen_envelope(rng)));
    auto r = decode_envelope(as_view(frame));
    if (!r.ok()) ++rejected;
    else if (!integrity_ok(r.value())) ++corrupt;
  }
  CHECK(rejected > 0);
  CHECK(corrupt > 0);  // single bit flips usually keep the structure intact
}
