#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riq/term.hpp"

namespace riq {

enum class NodeKind : uint8_t {
  GroupGraphPattern,
  GroupOrUnionGraphPattern,
  OptionalGraphPattern,
  Filter,
  Predicate,
  Exists,
  NotExists,
  Bgp,
};

// FILTER predicate expressions: comparisons with numeric coercion, regex, bound.
struct PredicateExpr {
  enum class Kind : uint8_t { Compare, Regex, Bound };
  enum class Op : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

  Kind kind = Kind::Compare;
  Op op = Op::Eq;
  PatternField lhs;        // Compare
  PatternField rhs;        // Compare
  std::string var;         // Regex / Bound
  std::string regex_text;  // Regex
};

struct BgpTreeNode {
  NodeKind kind;
  uint32_t id = 0;  // dense preorder id, assigned after parse; keys eval maps
  std::vector<std::unique_ptr<BgpTreeNode>> children;
  std::vector<TriplePattern> bgp;           // Bgp nodes; a set (duplicates removed)
  std::shared_ptr<PredicateExpr> predicate;  // Predicate nodes

  std::unique_ptr<BgpTreeNode> clone() const;
};

struct Query {
  bool select_all = false;
  std::vector<std::string> select_vars;
  std::string graph_var;
  std::unique_ptr<BgpTreeNode> root;  // GroupGraphPattern
  bool distinct = false;
  std::optional<uint64_t> limit;
  std::optional<uint64_t> offset;
  std::map<std::string, std::string> prefixes;  // expanded at parse time

  Query clone() const;
  // Total nodes; ids are in [0, node_count).
  uint32_t node_count = 0;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(size_t line, size_t col, const std::string& expected, const std::string& found);
  size_t line;
  size_t col;
  std::string expected;
  std::string found;
};

// One counter per grammar production, for coverage checks.
struct ProductionCounts {
  std::map<std::string, uint64_t> counts;
  uint64_t operator[](const std::string& name) const {
    auto it = counts.find(name);
    return it == counts.end() ? 0 : it->second;
  }
};

Query parse_query(const std::string& text, ProductionCounts* productions = nullptr);
std::string format_query(const Query& q);

// Structural equality, ignoring node ids.
bool tree_equal(const BgpTreeNode& a, const BgpTreeNode& b);
bool query_equal(const Query& a, const Query& b);

// Re-assign dense preorder ids; returns the node count.
uint32_t number_nodes(BgpTreeNode& root);

// All triple patterns of every Bgp node in the subtree, in preorder.
void collect_bgps(const BgpTreeNode& node, std::vector<const BgpTreeNode*>& out);
std::vector<std::string> collect_variables(const Query& q);  // graph var first, then appearance order

}  // namespace riq
