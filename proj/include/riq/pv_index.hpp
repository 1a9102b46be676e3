#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "riq/graph_store.hpp"
#include "riq/lsh.hpp"
#include "riq/pattern_vectors.hpp"
#include "riq/prob_filters.hpp"

namespace riq {

class CorruptIndex : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct IndexConfig {
  double epsilon = 0.05;
  uint32_t lsh_k = 5;
  uint32_t lsh_l = 3;
  uint64_t seed = 0;
  bool keep_pvs = false;
  uint32_t workers = 0;  // 0 = hardware concurrency

  void validate() const;
};

// One group of similar graphs: one Bloom filter for the SPO union vector and
// six Counting Bloom filters for the masked-pattern vectors.
struct GroupRecord {
  uint32_t group_id = 0;
  std::vector<GraphId> member_graph_ids;  // sorted
  BloomFilter spo_filter;
  std::array<CountingBloomFilter, kPatternCount - 1> pattern_filters;  // SP? .. ??O
  uint64_t member_quad_count = 0;

  const CountingBloomFilter& filter_for(CanonicalPattern p) const {
    return pattern_filters[static_cast<size_t>(p) - 1];
  }
  size_t filter_bytes() const;
};

struct IndexManifest {
  uint32_t version = 1;
  double epsilon = 0.05;
  uint64_t rabin_polynomial_low = 0;
  LshParams lsh;
  uint64_t filter_seed1 = 0;
  uint64_t filter_seed2 = 0;
  uint64_t graph_count = 0;
  uint64_t group_count = 0;
  uint64_t quad_count = 0;
  std::map<std::string, std::string> checksums;  // relative path -> fingerprint hex
};

class PvIndex {
 public:
  IndexManifest manifest;
  std::vector<GroupRecord> groups;

  const std::filesystem::path& directory() const { return dir_; }
  const Term& graph_context(GraphId id) const { return graph_contexts_[id]; }
  size_t graph_count() const { return graph_contexts_.size(); }
  // -1 if the graph id is not in any group (cannot happen for a valid index).
  int64_t group_of_graph(GraphId id) const;

  GraphStore load_group_quads(uint32_t group_id) const;

  friend PvIndex load_index(const std::filesystem::path& dir);
  friend PvIndex build_index(const GraphStore& store, const IndexConfig& config,
                             const std::filesystem::path& out_dir);

 private:
  std::filesystem::path dir_;
  std::vector<Term> graph_contexts_;  // by graph id
};

// Alg. 1's edge rule, via buckets keyed (pattern, band position, band value):
// two graphs land in one component iff connected through shared bucket keys.
std::vector<std::vector<GraphId>> build_similarity_groups(const std::vector<PatternVector>& pvs,
                                                          const LshParams& params,
                                                          uint32_t workers = 0);

GroupRecord build_group_record(const std::vector<GraphId>& component,
                               const std::vector<PatternVector>& pvs, double epsilon,
                               uint64_t filter_seed1, uint64_t filter_seed2, uint32_t group_id);

PvIndex build_index(const GraphStore& store, const IndexConfig& config,
                    const std::filesystem::path& out_dir);
PvIndex load_index(const std::filesystem::path& dir);

struct GroupStats {
  uint32_t group_id;
  size_t member_count;
  uint64_t quad_count;
  size_t filter_bytes;
};

struct IndexStats {
  uint64_t graph_count = 0;
  uint64_t group_count = 0;
  uint64_t quad_count = 0;
  size_t total_filter_bytes = 0;
  std::vector<GroupStats> groups;
};

IndexStats index_stats(const PvIndex& index);

// Per-graph pattern vectors, parallel across graphs.
std::vector<PatternVector> compute_pvs(const GraphStore& store, uint32_t workers = 0);

}  // namespace riq
