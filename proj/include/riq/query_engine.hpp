#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riq/graph_store.hpp"
#include "riq/pv_index.hpp"
#include "riq/sparql.hpp"

namespace riq {

class UnsupportedExpression : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateQuery : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct BindingTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<Term>>> rows;
};

struct FilterStats {
  uint64_t groups_tested = 0;
  uint64_t bgp_membership_tests = 0;
  uint64_t cells_compared = 0;
};

// Node-id indexed evaluation flags from one EvalBGPTree run.
using EvalMap = std::vector<uint8_t>;

struct CandidateReport {
  std::vector<uint32_t> candidate_group_ids;
  std::vector<Query> pruned_queries;  // parallel to candidate_group_ids
  FilterStats stats;
};

// Alg. 3: query filters are built with the group's exact filter parameters.
bool is_match(const std::vector<TriplePattern>& bgp, const GroupRecord& group,
              FilterStats* stats = nullptr);

// Alg. 2. eval must be sized for the query's node count and zeroed.
bool eval_bgp_tree(const BgpTreeNode& node, const GroupRecord& group, EvalMap& eval,
                   FilterStats* stats = nullptr);

CandidateReport find_candidates(const Query& q, const PvIndex& index, uint32_t workers = 0);

// Drops OPTIONAL subtrees and UNION branches whose eval flag is FALSE; keeps
// filters and result modifiers. A UNION reduced to one branch collapses into
// its parent.
Query rewrite_query(const Query& q, const EvalMap& eval);

BindingTable execute_on_group(const Query& q, const GraphStore& store);

BindingTable answer_query(const Query& q, const PvIndex& index, uint32_t workers = 0,
                          FilterStats* stats = nullptr);

// TSV with `NULL` for unbound cells; first line is the header.
std::string format_tsv(const BindingTable& table);
std::string format_json_rows(const BindingTable& table);

}  // namespace riq
