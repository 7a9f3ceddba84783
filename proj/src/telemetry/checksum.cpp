#include "gridbench/telemetry/checksum.hpp"

#include <array>

namespace gridbench::telemetry {

namespace {

constexpr std::array<std::uint32_t, 256> make_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t n = 0; n < 256; ++n) {
    std::uint32_t c = n;
    for (int bit = 0; bit < 8; ++bit)
      c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);  // reflected 0x04C11DB7
    table[n] = c;
  }
  return table;
}

constexpr auto kTable = make_table();

}  // namespace

std::uint32_t checksum(ByteView payload) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::uint8_t byte : payload)
    crc = kTable[(crc ^ byte) & 0xFFu] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

}  // namespace gridbench::telemetry
