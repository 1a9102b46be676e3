#include "riq/generator.hpp"

#include <random>

#include "json.hpp"

namespace riq {

namespace {

std::string vocab_ns(uint32_t v) { return "http://vocab" + std::to_string(v) + ".example.org/"; }

Term pool_iri(const std::string& ns, const char* role, uint32_t i) {
  return Term::iri(ns + role + "/" + std::to_string(i));
}

}  // namespace

GeneratedDataset generate_dataset(const GeneratorConfig& config) {
  GeneratedDataset out;
  std::mt19937_64 rng(config.seed);
  const std::string shared_ns = "http://shared.example.org/";

  out.vocabulary_graphs.resize(config.vocabularies);
  for (uint32_t v = 0; v < config.vocabularies; ++v) {
    const std::string ns = vocab_ns(v);
    for (uint32_t g = 0; g < config.graphs_per_vocabulary; ++g) {
      const Term context = Term::iri(ns + "graph/" + std::to_string(g));
      out.vocabulary_graphs[v].push_back(context);
      for (uint32_t t = 0; t < config.triples_per_graph; ++t) {
        const bool shared =
            config.overlap > 0.0 &&
            std::uniform_real_distribution<double>(0.0, 1.0)(rng) < config.overlap;
        const std::string& tns = shared ? shared_ns : ns;
        Quad q;
        q.subject = pool_iri(
            tns, "subject", std::uniform_int_distribution<uint32_t>(0, config.subject_pool - 1)(rng));
        q.predicate = pool_iri(
            tns, "predicate",
            std::uniform_int_distribution<uint32_t>(0, config.predicate_pool - 1)(rng));
        q.object = pool_iri(
            tns, "object", std::uniform_int_distribution<uint32_t>(0, config.object_pool - 1)(rng));
        q.context = context;
        out.quads.push_back(std::move(q));
      }
    }
  }
  return out;
}

std::string ground_truth_json(const GeneratedDataset& dataset) {
  nlohmann::json j;
  nlohmann::json vocabs;
  for (size_t v = 0; v < dataset.vocabulary_graphs.size(); ++v) {
    nlohmann::json contexts = nlohmann::json::array();
    for (const Term& c : dataset.vocabulary_graphs[v]) contexts.push_back(c.lexical);
    vocabs[std::to_string(v)] = std::move(contexts);
  }
  j["vocabularies"] = std::move(vocabs);
  j["quad_count"] = dataset.quads.size();
  return j.dump(2);
}

}  // namespace riq
