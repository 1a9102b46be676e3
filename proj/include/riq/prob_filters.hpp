#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace riq {

class ParamMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FilterFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sizing for a target false-positive rate at a given capacity. capacity 0
// designates the empty filter.
struct FilterParams {
  uint64_t capacity = 0;
  double epsilon = 0.05;
  uint64_t m_cells = 0;
  uint32_t k_hashes = 0;
  uint64_t seed1 = 0;
  uint64_t seed2 = 0;

  static FilterParams sized_for(uint64_t capacity, double epsilon, uint64_t seed1, uint64_t seed2);

  bool compatible_with(const FilterParams& other) const {
    return m_cells == other.m_cells && k_hashes == other.k_hashes && seed1 == other.seed1 &&
           seed2 == other.seed2;
  }
  bool is_empty_filter() const { return capacity == 0; }

  friend bool operator==(const FilterParams&, const FilterParams&) = default;

  // Double-hashed cell index for probe i, derived from the fingerprint halves.
  uint64_t cell(uint64_t item, uint32_t i) const;
};

class BloomFilter {
 public:
  BloomFilter() = default;
  explicit BloomFilter(FilterParams params);

  void insert(uint64_t item);
  bool query(uint64_t item) const;
  // TRUE iff query.bits AND bits == query.bits.
  bool contains_all(const BloomFilter& query) const;

  const FilterParams& params() const { return params_; }
  const std::vector<uint64_t>& words() const { return bits_; }
  size_t byte_size() const { return bits_.size() * sizeof(uint64_t); }

  void serialize(std::ostream& out) const;
  static BloomFilter deserialize(std::istream& in);

  friend bool operator==(const BloomFilter&, const BloomFilter&) = default;

 private:
  FilterParams params_;
  std::vector<uint64_t> bits_;
};

class CountingBloomFilter {
 public:
  CountingBloomFilter() = default;
  explicit CountingBloomFilter(FilterParams params);

  // Counters saturate at 65535 and never decrease.
  void insert(uint64_t item, uint32_t mult = 1);
  uint32_t count(uint64_t item) const;  // min over the item's k cells
  bool contains_all(const CountingBloomFilter& query) const;

  const FilterParams& params() const { return params_; }
  const std::vector<uint16_t>& counters() const { return counters_; }
  size_t byte_size() const { return counters_.size() * sizeof(uint16_t); }

  void serialize(std::ostream& out) const;
  static CountingBloomFilter deserialize(std::istream& in);

  friend bool operator==(const CountingBloomFilter&, const CountingBloomFilter&) = default;

 private:
  FilterParams params_;
  std::vector<uint16_t> counters_;
};

// Cells compared by the last contains_all call on this thread; feeds query
// statistics.
uint64_t filter_cells_compared();
void reset_filter_cells_compared();

}  // namespace riq
