#pragma once

#include <cstdint>
#include <vector>

#include "riq/pattern_vectors.hpp"
#include "riq/prob_filters.hpp"

namespace riq {

// Minhash banding: k bands of l rows each. Row hashes are h(x) = (a*x + b) mod u
// with all (a, b) pairs drawn deterministically from master_seed.
struct LshParams {
  uint32_t k = 5;
  uint32_t l = 3;
  uint64_t m = (1ULL << 61) - 1;  // band value range
  uint64_t u = (1ULL << 61) - 1;  // prime modulus for row hashes
  uint64_t master_seed = 0;
  std::vector<std::pair<uint64_t, uint64_t>> seeds;  // k*l pairs (a, b)

  static LshParams create(uint32_t k, uint32_t l, uint64_t master_seed);

  friend bool operator==(const LshParams& a, const LshParams& b) {
    return a.k == b.k && a.l == b.l && a.m == b.m && a.u == b.u && a.master_seed == b.master_seed;
  }
};

// k band values; empty multisets get the empty signature, which collides with
// nothing.
struct LshSignature {
  std::vector<uint64_t> values;

  bool empty() const { return values.empty(); }
};

LshSignature lsh_sign(const LshParams& params, const FingerprintMultiset& v);
bool bands_collide(const LshSignature& a, const LshSignature& b);

}  // namespace riq
