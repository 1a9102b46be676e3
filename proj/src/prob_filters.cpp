#include "riq/prob_filters.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

namespace riq {

namespace {

constexpr char kMagic[4] = {'R', 'I', 'Q', 'F'};
constexpr uint32_t kFormatVersion = 1;
constexpr uint8_t kTagBloom = 0;
constexpr uint8_t kTagCounting = 1;
constexpr uint8_t kTagEmpty = 2;

thread_local uint64_t g_cells_compared = 0;

uint64_t mix64(uint64_t x) {
  // splitmix64 finalizer
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FilterFormatError("truncated filter block");
  return v;
}

void write_header(std::ostream& out, uint8_t tag, const FilterParams& p) {
  out.write(kMagic, 4);
  write_pod(out, kFormatVersion);
  write_pod(out, tag);
  write_pod(out, p.capacity);
  write_pod(out, p.epsilon);
  write_pod(out, p.m_cells);
  write_pod(out, p.k_hashes);
  write_pod(out, p.seed1);
  write_pod(out, p.seed2);
}

uint8_t read_header(std::istream& in, FilterParams& p) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw FilterFormatError("bad filter magic");
  auto version = read_pod<uint32_t>(in);
  if (version != kFormatVersion) throw FilterFormatError("unsupported filter version");
  auto tag = read_pod<uint8_t>(in);
  p.capacity = read_pod<uint64_t>(in);
  p.epsilon = read_pod<double>(in);
  p.m_cells = read_pod<uint64_t>(in);
  p.k_hashes = read_pod<uint32_t>(in);
  p.seed1 = read_pod<uint64_t>(in);
  p.seed2 = read_pod<uint64_t>(in);
  return tag;
}

}  // namespace

FilterParams FilterParams::sized_for(uint64_t capacity, double epsilon, uint64_t seed1,
                                     uint64_t seed2) {
  FilterParams p;
  p.capacity = capacity;
  p.epsilon = epsilon;
  p.seed1 = seed1;
  p.seed2 = seed2;
  if (capacity == 0) return p;  // designated empty filter
  const double ln2 = std::log(2.0);
  double m = std::ceil(-static_cast<double>(capacity) * std::log(epsilon) / (ln2 * ln2));
  p.m_cells = std::max<uint64_t>(8, static_cast<uint64_t>(m));
  p.k_hashes = std::max<uint32_t>(
      1, static_cast<uint32_t>(std::llround(static_cast<double>(p.m_cells) / capacity * ln2)));
  return p;
}

uint64_t FilterParams::cell(uint64_t item, uint32_t i) const {
  const uint64_t h1 = mix64(item ^ seed1);
  const uint64_t h2 = mix64((item >> 32 | item << 32) ^ seed2) | 1;
  return (h1 + static_cast<uint64_t>(i) * h2) % m_cells;
}

BloomFilter::BloomFilter(FilterParams params) : params_(params) {
  bits_.assign((params_.m_cells + 63) / 64, 0);
}

void BloomFilter::insert(uint64_t item) {
  for (uint32_t i = 0; i < params_.k_hashes; ++i) {
    const uint64_t c = params_.cell(item, i);
    bits_[c >> 6] |= 1ULL << (c & 63);
  }
}

bool BloomFilter::query(uint64_t item) const {
  if (params_.is_empty_filter()) return false;
  for (uint32_t i = 0; i < params_.k_hashes; ++i) {
    const uint64_t c = params_.cell(item, i);
    if (!(bits_[c >> 6] & (1ULL << (c & 63)))) return false;
  }
  return true;
}

bool BloomFilter::contains_all(const BloomFilter& query) const {
  if (query.params_.is_empty_filter()) return true;
  if (params_.is_empty_filter()) return false;
  if (!params_.compatible_with(query.params_))
    throw ParamMismatch("bloom filter params differ");
  g_cells_compared += params_.m_cells;
  for (size_t i = 0; i < bits_.size(); ++i) {
    if ((bits_[i] & query.bits_[i]) != query.bits_[i]) return false;
  }
  return true;
}

void BloomFilter::serialize(std::ostream& out) const {
  write_header(out, params_.is_empty_filter() ? kTagEmpty : kTagBloom, params_);
  if (!params_.is_empty_filter())
    out.write(reinterpret_cast<const char*>(bits_.data()),
              static_cast<std::streamsize>(bits_.size() * sizeof(uint64_t)));
}

BloomFilter BloomFilter::deserialize(std::istream& in) {
  FilterParams p;
  const uint8_t tag = read_header(in, p);
  if (tag == kTagEmpty) return BloomFilter(p);
  if (tag != kTagBloom) throw FilterFormatError("expected a Bloom filter block");
  BloomFilter f(p);
  in.read(reinterpret_cast<char*>(f.bits_.data()),
          static_cast<std::streamsize>(f.bits_.size() * sizeof(uint64_t)));
  if (!in) throw FilterFormatError("truncated Bloom filter payload");
  return f;
}

CountingBloomFilter::CountingBloomFilter(FilterParams params) : params_(params) {
  counters_.assign(params_.m_cells, 0);
}

void CountingBloomFilter::insert(uint64_t item, uint32_t mult) {
  for (uint32_t i = 0; i < params_.k_hashes; ++i) {
    uint16_t& c = counters_[params_.cell(item, i)];
    const uint32_t next = static_cast<uint32_t>(c) + mult;
    c = next > 0xFFFF ? 0xFFFF : static_cast<uint16_t>(next);
  }
}

uint32_t CountingBloomFilter::count(uint64_t item) const {
  if (params_.is_empty_filter()) return 0;
  uint32_t best = 0xFFFFFFFF;
  for (uint32_t i = 0; i < params_.k_hashes; ++i) {
    best = std::min<uint32_t>(best, counters_[params_.cell(item, i)]);
  }
  return best;
}

bool CountingBloomFilter::contains_all(const CountingBloomFilter& query) const {
  if (query.params_.is_empty_filter()) return true;
  if (params_.is_empty_filter()) return false;
  if (!params_.compatible_with(query.params_))
    throw ParamMismatch("counting bloom filter params differ");
  g_cells_compared += params_.m_cells;
  for (size_t i = 0; i < counters_.size(); ++i) {
    if (query.counters_[i] > 0 && counters_[i] < query.counters_[i]) return false;
  }
  return true;
}

void CountingBloomFilter::serialize(std::ostream& out) const {
  write_header(out, params_.is_empty_filter() ? kTagEmpty : kTagCounting, params_);
  if (!params_.is_empty_filter())
    out.write(reinterpret_cast<const char*>(counters_.data()),
              static_cast<std::streamsize>(counters_.size() * sizeof(uint16_t)));
}

CountingBloomFilter CountingBloomFilter::deserialize(std::istream& in) {
  FilterParams p;
  const uint8_t tag = read_header(in, p);
  if (tag == kTagEmpty) return CountingBloomFilter(p);
  if (tag != kTagCounting) throw FilterFormatError("expected a Counting Bloom filter block");
  CountingBloomFilter f(p);
  in.read(reinterpret_cast<char*>(f.counters_.data()),
          static_cast<std::streamsize>(f.counters_.size() * sizeof(uint16_t)));
  if (!in) throw FilterFormatError("truncated Counting Bloom filter payload");
  return f;
}

uint64_t filter_cells_compared() { return g_cells_compared; }
void reset_filter_cells_compared() { g_cells_compared = 0; }

}  // namespace riq
