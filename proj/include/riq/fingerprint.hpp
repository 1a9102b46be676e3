#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace riq {

// Rabin fingerprinting over GF(2), reduced by a fixed irreducible degree-64
// polynomial. The polynomial is part of the index format: indexes built with a
// different polynomial are incompatible.
namespace fingerprint {

// x^64 + x^4 + x^3 + x + 1, low 64 coefficients.
inline constexpr uint64_t kPolynomialLow = 0x1B;
inline constexpr unsigned kWidthBits = 64;

// The message is prefixed with an implicit 1 bit so inputs that differ only in
// leading zero bytes (or length) fingerprint differently.
uint64_t fingerprint(std::span<const uint8_t> bytes);
uint64_t fingerprint(std::string_view bytes);

}  // namespace fingerprint
}  // namespace riq
