#include "riq/pattern_vectors.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "riq/fingerprint.hpp"

namespace riq {

namespace {

constexpr char kFieldSep = '\x1F';
constexpr char kMetaSep = '\x1E';

// Which positions survive masking, per Table-style row: (subject, predicate, object).
struct Mask {
  bool s, p, o;
};

constexpr Mask mask_of(CanonicalPattern p) {
  switch (p) {
    case CanonicalPattern::SPO: return {true, true, true};
    case CanonicalPattern::SPx: return {true, true, false};
    case CanonicalPattern::SxO: return {true, false, true};
    case CanonicalPattern::xPO: return {false, true, true};
    case CanonicalPattern::Sxx: return {true, false, false};
    case CanonicalPattern::xPx: return {false, true, false};
    case CanonicalPattern::xxO: return {false, false, true};
  }
  return {false, false, false};
}

void encode_field(std::string& out, const std::optional<Term>& field) {
  if (!field) {
    out.push_back('?');
    return;
  }
  switch (field->kind) {
    case TermKind::Iri: out.push_back('I'); break;
    case TermKind::Literal: out.push_back('L'); break;
    case TermKind::BlankNode: out.push_back('B'); break;
  }
  out += field->lexical;
  if (field->datatype) {
    out.push_back(kMetaSep);
    out += *field->datatype;
  } else if (field->language) {
    out.push_back(kMetaSep);
    out.push_back('@');
    out += *field->language;
  }
}

}  // namespace

const char* pattern_name(CanonicalPattern p) {
  switch (p) {
    case CanonicalPattern::SPO: return "SPO";
    case CanonicalPattern::SPx: return "SP?";
    case CanonicalPattern::SxO: return "S?O";
    case CanonicalPattern::xPO: return "?PO";
    case CanonicalPattern::Sxx: return "S??";
    case CanonicalPattern::xPx: return "?P?";
    case CanonicalPattern::xxO: return "??O";
  }
  return "?";
}

MaskedTriple f_d(CanonicalPattern pattern, const Triple& triple) {
  const Mask m = mask_of(pattern);
  MaskedTriple mt;
  if (m.s) mt.subject = triple.subject;
  if (m.p) mt.predicate = triple.predicate;
  if (m.o) mt.object = triple.object;
  return mt;
}

std::pair<CanonicalPattern, MaskedTriple> f_q(const TriplePattern& tp) {
  const bool vs = is_variable(tp.subject);
  const bool vp = is_variable(tp.predicate);
  const bool vo = is_variable(tp.object);
  CanonicalPattern pattern;
  if (!vs && !vp && !vo) pattern = CanonicalPattern::SPO;
  else if (!vs && !vp) pattern = CanonicalPattern::SPx;
  else if (!vs && !vo) pattern = CanonicalPattern::SxO;
  else if (!vp && !vo) pattern = CanonicalPattern::xPO;
  else if (!vs) pattern = CanonicalPattern::Sxx;
  else if (!vp) pattern = CanonicalPattern::xPx;
  else pattern = CanonicalPattern::xxO;

  MaskedTriple mt;
  if (!vs) mt.subject = as_term(tp.subject);
  if (!vp) mt.predicate = as_term(tp.predicate);
  if (!vo) mt.object = as_term(tp.object);
  return {pattern, std::move(mt)};
}

std::string encode_masked_triple(CanonicalPattern pattern, const MaskedTriple& mt) {
  std::string out;
  out.push_back(static_cast<char>(pattern));
  out.push_back(kFieldSep);
  encode_field(out, mt.subject);
  out.push_back(kFieldSep);
  encode_field(out, mt.predicate);
  out.push_back(kFieldSep);
  encode_field(out, mt.object);
  return out;
}

uint64_t hash_masked_triple(CanonicalPattern pattern, const MaskedTriple& mt) {
  return fingerprint::fingerprint(encode_masked_triple(pattern, mt));
}

void FingerprintMultiset::insert(uint64_t fp, uint32_t mult) {
  entries_.emplace_back(fp, mult);
  frozen_ = false;
}

void FingerprintMultiset::freeze() {
  if (frozen_) return;
  std::sort(entries_.begin(), entries_.end());
  std::vector<Entry> merged;
  merged.reserve(entries_.size());
  for (const Entry& e : entries_) {
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  entries_ = std::move(merged);
  frozen_ = true;
}

uint64_t FingerprintMultiset::total_multiplicity() const {
  uint64_t n = 0;
  for (const Entry& e : entries_) n += e.second;
  return n;
}

uint32_t FingerprintMultiset::multiplicity_of(uint64_t fp) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{fp, 0});
  if (it != entries_.end() && it->first == fp) return it->second;
  return 0;
}

FingerprintMultiset FingerprintMultiset::union_max(const FingerprintMultiset& a,
                                                  const FingerprintMultiset& b) {
  FingerprintMultiset out;
  auto ia = a.entries_.begin();
  auto ib = b.entries_.begin();
  while (ia != a.entries_.end() || ib != b.entries_.end()) {
    if (ib == b.entries_.end() || (ia != a.entries_.end() && ia->first < ib->first)) {
      out.entries_.push_back(*ia++);
    } else if (ia == a.entries_.end() || ib->first < ia->first) {
      out.entries_.push_back(*ib++);
    } else {
      out.entries_.emplace_back(ia->first, std::max(ia->second, ib->second));
      ++ia;
      ++ib;
    }
  }
  return out;
}

double FingerprintMultiset::jaccard(const FingerprintMultiset& a, const FingerprintMultiset& b) {
  uint64_t inter = 0, uni = 0;
  auto ia = a.entries_.begin();
  auto ib = b.entries_.begin();
  while (ia != a.entries_.end() || ib != b.entries_.end()) {
    if (ib == b.entries_.end() || (ia != a.entries_.end() && ia->first < ib->first)) {
      uni += (ia++)->second;
    } else if (ia == a.entries_.end() || ib->first < ia->first) {
      uni += (ib++)->second;
    } else {
      inter += std::min(ia->second, ib->second);
      uni += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  // Two empty multisets share no content; similarity 0 by convention.
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

bool FingerprintMultiset::contains(const FingerprintMultiset& container,
                                   const FingerprintMultiset& query) {
  auto ic = container.entries_.begin();
  for (const Entry& q : query.entries_) {
    while (ic != container.entries_.end() && ic->first < q.first) ++ic;
    if (ic == container.entries_.end() || ic->first != q.first || ic->second < q.second)
      return false;
  }
  return true;
}

PatternVector pv_of_graph(const std::set<Triple>& triples) {
  PatternVector pv;
  for (const Triple& t : triples) {
    for (CanonicalPattern r : kAllPatterns) {
      pv[r].insert(hash_masked_triple(r, f_d(r, t)));
    }
  }
  for (auto& v : pv.vectors) v.freeze();
  return pv;
}

PatternVector pv_of_bgp(const std::vector<TriplePattern>& patterns) {
  // Distinct patterns that erase to the same masked triple (differing only in
  // variable names) can all be satisfied by a single graph triple, so each
  // distinct masked triple is required at most once.
  std::array<std::set<uint64_t>, kPatternCount> seen;
  for (const TriplePattern& tp : patterns) {
    // An all-variable pattern matches any triple and contributes no constraint.
    if (is_variable(tp.subject) && is_variable(tp.predicate) && is_variable(tp.object)) continue;
    auto [r, mt] = f_q(tp);
    seen[static_cast<size_t>(r)].insert(hash_masked_triple(r, mt));
  }
  PatternVector pv;
  for (size_t i = 0; i < kPatternCount; ++i) {
    for (uint64_t fp : seen[i]) pv.vectors[i].insert(fp);
    pv.vectors[i].freeze();
  }
  return pv;
}

PatternVector pv_union(const PatternVector& a, const PatternVector& b) {
  PatternVector out;
  for (size_t i = 0; i < kPatternCount; ++i) {
    out.vectors[i] = FingerprintMultiset::union_max(a.vectors[i], b.vectors[i]);
  }
  return out;
}

double pv_similarity(const PatternVector& a, const PatternVector& b) {
  double best = 0.0;
  for (size_t i = 0; i < kPatternCount; ++i) {
    best = std::max(best, FingerprintMultiset::jaccard(a.vectors[i], b.vectors[i]));
  }
  return best;
}

bool pv_contains(const PatternVector& container, const PatternVector& query) {
  for (size_t i = 0; i < kPatternCount; ++i) {
    if (!FingerprintMultiset::contains(container.vectors[i], query.vectors[i])) return false;
  }
  return true;
}

void dump_pv(const PatternVector& pv, std::ostream& out) {
  char buf[17];
  for (CanonicalPattern r : kAllPatterns) {
    for (const auto& [fp, mult] : pv[r].entries()) {
      snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
      out << pattern_name(r) << "\t" << buf << "\t" << mult << "\n";
    }
  }
}

}  // namespace riq
