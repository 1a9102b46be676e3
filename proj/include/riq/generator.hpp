#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riq/term.hpp"

namespace riq {

// Synthetic quad datasets for tests and benchmarks: several vocabularies, each
// with its own IRI namespace and term pools; graphs draw triples from one
// vocabulary's pools, so cross-vocabulary content is disjoint unless overlap
// is requested.
struct GeneratorConfig {
  uint32_t vocabularies = 5;
  uint32_t graphs_per_vocabulary = 200;
  uint32_t triples_per_graph = 50;
  double overlap = 0.0;  // fraction of triples drawn from a shared pool
  uint64_t seed = 1;

  uint32_t subject_pool = 100;
  uint32_t predicate_pool = 10;
  uint32_t object_pool = 200;
};

struct GeneratedDataset {
  std::vector<Quad> quads;
  // vocabulary -> contexts of its graphs, in generation order
  std::vector<std::vector<Term>> vocabulary_graphs;
};

GeneratedDataset generate_dataset(const GeneratorConfig& config);

// Ground-truth JSON: vocabulary id -> list of context IRIs.
std::string ground_truth_json(const GeneratedDataset& dataset);

}  // namespace riq
