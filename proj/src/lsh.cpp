#include "riq/lsh.hpp"

#include <limits>
#include <random>

#include "riq/fingerprint.hpp"

namespace riq {

namespace {

uint64_t mulmod(uint64_t a, uint64_t x, uint64_t u) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * x) % u);
}

}  // namespace

LshParams LshParams::create(uint32_t k, uint32_t l, uint64_t master_seed) {
  LshParams p;
  p.k = k;
  p.l = l;
  p.master_seed = master_seed;
  std::mt19937_64 rng(master_seed);
  std::uniform_int_distribution<uint64_t> dist_a(1, p.u - 1);
  std::uniform_int_distribution<uint64_t> dist_b(0, p.u - 1);
  p.seeds.reserve(static_cast<size_t>(k) * l);
  for (uint32_t i = 0; i < k * l; ++i) {
    p.seeds.emplace_back(dist_a(rng), dist_b(rng));
  }
  return p;
}

LshSignature lsh_sign(const LshParams& params, const FingerprintMultiset& v) {
  LshSignature sig;
  if (v.empty()) return sig;
  sig.values.reserve(params.k);
  std::vector<uint64_t> rows(params.l);
  for (uint32_t band = 0; band < params.k; ++band) {
    for (uint32_t row = 0; row < params.l; ++row) {
      const auto [a, b] = params.seeds[band * params.l + row];
      uint64_t best = std::numeric_limits<uint64_t>::max();
      // Min over the support; multiplicities do not affect the signature.
      for (const auto& [fp, mult] : v.entries()) {
        const uint64_t h = (mulmod(a, fp % params.u, params.u) + b) % params.u;
        if (h < best) best = h;
      }
      rows[row] = best;
    }
    const uint64_t band_fp = fingerprint::fingerprint(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(rows.data()), rows.size() * sizeof(uint64_t)));
    sig.values.push_back(band_fp % params.m);
  }
  return sig;
}

bool bands_collide(const LshSignature& a, const LshSignature& b) {
  if (a.empty() || b.empty()) return false;
  if (a.values.size() != b.values.size()) throw ParamMismatch("signatures from different LSH params");
  for (size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] == b.values[i]) return true;
  }
  return false;
}

}  // namespace riq
