#pragma once

#include <cstdint>

#include "gridbench/common/bytes.hpp"

namespace gridbench::telemetry {

// CRC-32 (IEEE 802.3): polynomial 0x04C11DB7 in reflected form, init and
// final xor 0xFFFFFFFF. checksum("123456789") == 0xCBF43926, checksum("") == 0.
std::uint32_t checksum(ByteView payload);

}  // namespace gridbench::telemetry
