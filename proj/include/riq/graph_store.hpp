#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "riq/term.hpp"

namespace riq {

using GraphId = uint32_t;

// Immutable after build: one set of unique triples per context, ids in
// first-seen order.
class GraphStore {
 public:
  GraphId add_quad(const Quad& q);
  void add_quads(const std::vector<Quad>& quads);

  size_t graph_count() const { return contexts_.size(); }
  size_t triple_count() const;

  const Term& context(GraphId id) const { return contexts_[id]; }
  const std::set<Triple>& triples(GraphId id) const { return graphs_[id]; }
  const Term* find_context(GraphId id) const {
    return id < contexts_.size() ? &contexts_[id] : nullptr;
  }
  // -1 if the context is unknown.
  int64_t graph_id(const Term& context) const;

  std::vector<Quad> all_quads() const;
  std::vector<Quad> quads_of(GraphId id) const;

 private:
  std::vector<Term> contexts_;
  std::vector<std::set<Triple>> graphs_;
  std::map<Term, GraphId> ids_;
};

GraphStore group_by_context(const std::vector<Quad>& quads);

}  // namespace riq
