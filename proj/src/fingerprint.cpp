#include "riq/fingerprint.hpp"

#include <array>

namespace riq::fingerprint {

namespace {

constexpr uint64_t shift_mod(uint64_t r) {
  return (r << 1) ^ ((r >> 63) ? kPolynomialLow : 0);
}

// table[t] = (t * x^64) mod P
constexpr std::array<uint64_t, 256> make_table() {
  std::array<uint64_t, 256> table{};
  for (unsigned t = 0; t < 256; ++t) {
    uint64_t r = t;
    for (int i = 0; i < 64; ++i) r = shift_mod(r);
    table[t] = r;
  }
  return table;
}

constexpr std::array<uint64_t, 256> kTable = make_table();

}  // namespace

uint64_t fingerprint(std::span<const uint8_t> bytes) {
  uint64_t fp = 1;  // implicit leading 1 bit
  for (uint8_t b : bytes) {
    fp = (fp << 8) ^ b ^ kTable[fp >> 56];
  }
  return fp;
}

uint64_t fingerprint(std::string_view bytes) {
  return fingerprint(
      std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size()));
}

}  // namespace riq::fingerprint
