#include "riq/graph_store.hpp"

namespace riq {

GraphId GraphStore::add_quad(const Quad& q) {
  auto [it, inserted] = ids_.try_emplace(q.context, static_cast<GraphId>(contexts_.size()));
  if (inserted) {
    contexts_.push_back(q.context);
    graphs_.emplace_back();
  }
  graphs_[it->second].insert(q.triple());
  return it->second;
}

void GraphStore::add_quads(const std::vector<Quad>& quads) {
  for (const Quad& q : quads) add_quad(q);
}

size_t GraphStore::triple_count() const {
  size_t n = 0;
  for (const auto& g : graphs_) n += g.size();
  return n;
}

int64_t GraphStore::graph_id(const Term& context) const {
  auto it = ids_.find(context);
  return it == ids_.end() ? -1 : static_cast<int64_t>(it->second);
}

std::vector<Quad> GraphStore::all_quads() const {
  std::vector<Quad> out;
  out.reserve(triple_count());
  for (GraphId id = 0; id < contexts_.size(); ++id) {
    for (const Triple& t : graphs_[id]) out.push_back(Quad{t.subject, t.predicate, t.object, contexts_[id]});
  }
  return out;
}

std::vector<Quad> GraphStore::quads_of(GraphId id) const {
  std::vector<Quad> out;
  out.reserve(graphs_[id].size());
  for (const Triple& t : graphs_[id]) out.push_back(Quad{t.subject, t.predicate, t.object, contexts_[id]});
  return out;
}

GraphStore group_by_context(const std::vector<Quad>& quads) {
  GraphStore store;
  store.add_quads(quads);
  return store;
}

}  // namespace riq
