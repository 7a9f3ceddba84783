#pragma once

#include <cstdint>

namespace gridbench {

// Shared frame preamble: every self-describing frame starts with
//   u16 magic, u8 version, u8 frame kind.
inline constexpr std::uint16_t kWireMagic = 0x4742;  // "GB"
inline constexpr std::uint8_t kWireVersion = 1;

enum class FrameKind : std::uint8_t {
  Sv = 1,
  Goose = 2,
  Telemetry = 3,
  Routable = 4,
};

inline constexpr std::size_t kPreambleLen = 4;

}  // namespace gridbench
