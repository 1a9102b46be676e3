#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "riq/term.hpp"

namespace riq {

// The seven canonical patterns; the order is fixed and used for serialization.
enum class CanonicalPattern : uint8_t { SPO = 0, SPx, SxO, xPO, Sxx, xPx, xxO };

inline constexpr size_t kPatternCount = 7;
inline constexpr std::array<CanonicalPattern, kPatternCount> kAllPatterns = {
    CanonicalPattern::SPO, CanonicalPattern::SPx, CanonicalPattern::SxO, CanonicalPattern::xPO,
    CanonicalPattern::Sxx, CanonicalPattern::xPx, CanonicalPattern::xxO};

const char* pattern_name(CanonicalPattern p);

// A triple with positions masked to `?`. Absent optional = wildcard.
struct MaskedTriple {
  std::optional<Term> subject;
  std::optional<Term> predicate;
  std::optional<Term> object;

  friend bool operator==(const MaskedTriple&, const MaskedTriple&) = default;
};

MaskedTriple f_d(CanonicalPattern pattern, const Triple& triple);
// Canonical pattern is determined by which positions hold variables; variable
// names are erased.
std::pair<CanonicalPattern, MaskedTriple> f_q(const TriplePattern& tp);

// Injective byte encoding of a masked triple, the input to the fingerprint.
std::string encode_masked_triple(CanonicalPattern pattern, const MaskedTriple& mt);
uint64_t hash_masked_triple(CanonicalPattern pattern, const MaskedTriple& mt);

// Sorted multiset of fingerprints.
class FingerprintMultiset {
 public:
  using Entry = std::pair<uint64_t, uint32_t>;  // fingerprint, multiplicity

  void insert(uint64_t fp, uint32_t mult = 1);  // build-time; keeps entries sorted on freeze
  void freeze();                                // sort + coalesce; idempotent

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  size_t distinct_count() const { return entries_.size(); }
  uint64_t total_multiplicity() const;
  uint32_t multiplicity_of(uint64_t fp) const;

  friend bool operator==(const FingerprintMultiset&, const FingerprintMultiset&) = default;

  static FingerprintMultiset union_max(const FingerprintMultiset& a, const FingerprintMultiset& b);
  // Standard multiset Jaccard: intersection sums min multiplicities, union max.
  static double jaccard(const FingerprintMultiset& a, const FingerprintMultiset& b);
  static bool contains(const FingerprintMultiset& container, const FingerprintMultiset& query);

 private:
  std::vector<Entry> entries_;
  bool frozen_ = true;
};

// Seven fingerprint multisets, one per canonical pattern.
struct PatternVector {
  std::array<FingerprintMultiset, kPatternCount> vectors;

  const FingerprintMultiset& operator[](CanonicalPattern p) const {
    return vectors[static_cast<size_t>(p)];
  }
  FingerprintMultiset& operator[](CanonicalPattern p) {
    return vectors[static_cast<size_t>(p)];
  }

  friend bool operator==(const PatternVector&, const PatternVector&) = default;
};

PatternVector pv_of_graph(const std::set<Triple>& triples);
// All-variable patterns are skipped: they match every triple and would
// otherwise dismiss graphs they trivially match.
PatternVector pv_of_bgp(const std::vector<TriplePattern>& patterns);
PatternVector pv_union(const PatternVector& a, const PatternVector& b);
double pv_similarity(const PatternVector& a, const PatternVector& b);
// Exact, filter-free containment: the oracle form of IsMatch.
bool pv_contains(const PatternVector& container, const PatternVector& query);

// Debug dump: per pattern, lines `r<TAB>fingerprint-hex<TAB>multiplicity`.
void dump_pv(const PatternVector& pv, std::ostream& out);

}  // namespace riq
