#include "riq/query_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "riq/nquads.hpp"
#include "riq/pattern_vectors.hpp"

namespace riq {

namespace {

using Row = std::vector<std::optional<Term>>;

// ---- Alg. 3 -------------------------------------------------------------

bool spo_filter_match(const FingerprintMultiset& qv, const GroupRecord& group) {
  if (qv.empty()) return true;
  if (group.spo_filter.params().is_empty_filter()) return false;
  BloomFilter qf(group.spo_filter.params());
  // BGP triple patterns are a set; SPO query entries are deduplicated.
  for (const auto& [fp, mult] : qv.entries()) qf.insert(fp);
  return group.spo_filter.contains_all(qf);
}

bool cbf_filter_match(const FingerprintMultiset& qv, const CountingBloomFilter& cf) {
  if (qv.empty()) return true;
  if (cf.params().is_empty_filter()) return false;
  CountingBloomFilter qf(cf.params());
  for (const auto& [fp, mult] : qv.entries()) qf.insert(fp, mult);
  return cf.contains_all(qf);
}

}  // namespace

bool is_match(const std::vector<TriplePattern>& bgp, const GroupRecord& group,
              FilterStats* stats) {
  const uint64_t cells_before = filter_cells_compared();
  const PatternVector qpv = pv_of_bgp(bgp);
  bool ok = spo_filter_match(qpv[CanonicalPattern::SPO], group);
  for (size_t r = 1; ok && r < kPatternCount; ++r) {
    ok = cbf_filter_match(qpv.vectors[r], group.pattern_filters[r - 1]);
  }
  if (stats) {
    ++stats->bgp_membership_tests;
    stats->cells_compared += filter_cells_compared() - cells_before;
  }
  return ok;
}

// ---- Alg. 2 -------------------------------------------------------------

bool eval_bgp_tree(const BgpTreeNode& node, const GroupRecord& group, EvalMap& eval,
                   FilterStats* stats) {
  for (const auto& child : node.children) {
    const bool child_eval = eval_bgp_tree(*child, group, eval, stats);
    if (node.kind == NodeKind::GroupGraphPattern && !child_eval) {
      eval[node.id] = 0;
      return false;  // skip rest of the nodes
    }
  }
  bool result;
  switch (node.kind) {
    case NodeKind::GroupOrUnionGraphPattern: {
      result = false;
      for (const auto& child : node.children) result = result || eval[child->id] != 0;
      break;
    }
    case NodeKind::Exists:
      result = eval[node.children.at(0)->id] != 0;
      break;
    case NodeKind::NotExists:
      result = true;
      break;
    case NodeKind::Predicate:
      result = true;  // skip processing predicates
      break;
    case NodeKind::Bgp:
      result = is_match(node.bgp, group, stats);
      break;
    case NodeKind::GroupGraphPattern:
      // Any failing required child already short-circuited above; optionals
      // that evaluated FALSE do not disqualify the group.
      result = true;
      break;
    default:
      // OptionalGraphPattern, Filter: value of the only child.
      result = node.children.empty() ? true : eval[node.children.back()->id] != 0;
      break;
  }
  eval[node.id] = result ? 1 : 0;
  // OPTIONAL never fails its parent; its own flag drives rewriting.
  if (node.kind == NodeKind::OptionalGraphPattern) return true;
  return result;
}

CandidateReport find_candidates(const Query& q, const PvIndex& index, uint32_t workers) {
  CandidateReport report;
  const size_t n = index.groups.size();
  std::vector<uint8_t> is_candidate(n, 0);
  std::vector<EvalMap> evals(n);

  std::atomic<uint64_t> bgp_tests{0}, cells{0};
  auto run_group = [&](size_t i) {
    FilterStats local;
    EvalMap eval(q.node_count, 0);
    const bool ok = eval_bgp_tree(*q.root, index.groups[i], eval, &local);
    is_candidate[i] = ok ? 1 : 0;
    if (ok) evals[i] = std::move(eval);
    bgp_tests += local.bgp_membership_tests;
    cells += local.cells_compared;
  };

  const uint32_t wanted =
      workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  if (wanted <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) run_group(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> threads;
    for (uint32_t t = 0; t < std::min<size_t>(wanted, n); ++t) {
      threads.emplace_back([&] {
        while (true) {
          const size_t i = next.fetch_add(1);
          if (i >= n) break;
          run_group(i);
        }
      });
    }
    for (auto& t : threads) t.join();
  }

  report.stats.groups_tested = n;
  report.stats.bgp_membership_tests = bgp_tests;
  report.stats.cells_compared = cells;
  for (size_t i = 0; i < n; ++i) {
    if (is_candidate[i]) {
      report.candidate_group_ids.push_back(index.groups[i].group_id);
      report.pruned_queries.push_back(rewrite_query(q, evals[i]));
    }
  }
  return report;
}

// ---- Rewriting ----------------------------------------------------------

namespace {

std::unique_ptr<BgpTreeNode> prune_node(const BgpTreeNode& node, const EvalMap& eval);

void prune_into_group(const BgpTreeNode& group, const EvalMap& eval, BgpTreeNode& out) {
  for (const auto& child : group.children) {
    if (child->kind == NodeKind::OptionalGraphPattern && !eval[child->id]) continue;
    if (child->kind == NodeKind::GroupOrUnionGraphPattern) {
      std::vector<const BgpTreeNode*> live;
      for (const auto& branch : child->children) {
        if (eval[branch->id]) live.push_back(branch.get());
      }
      if (live.empty()) throw DegenerateQuery("UNION with no surviving branch in a candidate");
      if (live.size() == 1) {
        // Single-branch UNION collapses into its parent.
        prune_into_group(*live[0], eval, out);
      } else {
        auto uni = std::make_unique<BgpTreeNode>();
        uni->kind = NodeKind::GroupOrUnionGraphPattern;
        for (const BgpTreeNode* b : live) uni->children.push_back(prune_node(*b, eval));
        out.children.push_back(std::move(uni));
      }
      continue;
    }
    out.children.push_back(prune_node(*child, eval));
  }
}

std::unique_ptr<BgpTreeNode> prune_node(const BgpTreeNode& node, const EvalMap& eval) {
  if (node.kind == NodeKind::GroupGraphPattern) {
    auto out = std::make_unique<BgpTreeNode>();
    out->kind = NodeKind::GroupGraphPattern;
    prune_into_group(node, eval, *out);
    return out;
  }
  if (node.kind == NodeKind::OptionalGraphPattern) {
    auto out = std::make_unique<BgpTreeNode>();
    out->kind = NodeKind::OptionalGraphPattern;
    out->children.push_back(prune_node(*node.children.at(0), eval));
    return out;
  }
  // Filters, predicates, EXISTS blocks, and BGPs are retained as-is.
  return node.clone();
}

}  // namespace

Query rewrite_query(const Query& q, const EvalMap& eval) {
  Query out = q.clone();
  out.root = prune_node(*q.root, eval);
  out.node_count = number_nodes(*out.root);
  return out;
}

// ---- Execution ----------------------------------------------------------

namespace {

const std::array<const char*, 13> kNumericDatatypes = {
    "http://www.w3.org/2001/XMLSchema#integer",
    "http://www.w3.org/2001/XMLSchema#decimal",
    "http://www.w3.org/2001/XMLSchema#double",
    "http://www.w3.org/2001/XMLSchema#float",
    "http://www.w3.org/2001/XMLSchema#long",
    "http://www.w3.org/2001/XMLSchema#int",
    "http://www.w3.org/2001/XMLSchema#short",
    "http://www.w3.org/2001/XMLSchema#byte",
    "http://www.w3.org/2001/XMLSchema#nonNegativeInteger",
    "http://www.w3.org/2001/XMLSchema#positiveInteger",
    "http://www.w3.org/2001/XMLSchema#unsignedLong",
    "http://www.w3.org/2001/XMLSchema#unsignedInt",
    "http://www.w3.org/2001/XMLSchema#negativeInteger",
};

bool numeric_value(const Term& t, double& out) {
  if (!t.is_literal() || !t.datatype) return false;
  if (std::find(kNumericDatatypes.begin(), kNumericDatatypes.end(), *t.datatype) ==
      kNumericDatatypes.end())
    return false;
  char* end = nullptr;
  out = std::strtod(t.lexical.c_str(), &end);
  return end && *end == '\0' && end != t.lexical.c_str();
}

class GroupExecutor {
 public:
  GroupExecutor(const Query& q, const GraphStore& store) : q_(q), store_(store) {
    columns_ = collect_variables(q);
    for (size_t i = 0; i < columns_.size(); ++i) index_[columns_[i]] = i;
  }

  BindingTable run() {
    BindingTable table;
    table.columns = columns_;
    for (GraphId g = 0; g < store_.graph_count(); ++g) {
      Row unit(columns_.size());
      unit[index_.at(q_.graph_var)] = store_.context(g);
      std::vector<Row> rows = eval_group(*q_.root, {std::move(unit)}, g);
      for (Row& r : rows) table.rows.push_back(std::move(r));
    }
    return table;
  }

 private:
  size_t var_index(const std::string& name) const { return index_.at(name); }

  std::vector<Row> eval_group(const BgpTreeNode& node, std::vector<Row> rows, GraphId g) {
    for (const auto& child : node.children) rows = apply(*child, std::move(rows), g);
    return rows;
  }

  std::vector<Row> apply(const BgpTreeNode& node, std::vector<Row> rows, GraphId g) {
    switch (node.kind) {
      case NodeKind::Bgp: {
        std::vector<Row> out;
        for (const Row& row : rows) match_bgp(node.bgp, row, g, out, false);
        return out;
      }
      case NodeKind::OptionalGraphPattern: {
        const std::vector<Row> right =
            eval_group(*node.children.at(0), {Row(columns_.size())}, g);
        return left_join(rows, right);
      }
      case NodeKind::GroupOrUnionGraphPattern: {
        std::vector<Row> merged;
        for (const auto& branch : node.children) {
          std::vector<Row> r = eval_group(*branch, {Row(columns_.size())}, g);
          merged.insert(merged.end(), std::make_move_iterator(r.begin()),
                        std::make_move_iterator(r.end()));
        }
        return inner_join(rows, merged);
      }
      case NodeKind::Filter:
        return apply_filter(*node.children.at(0), std::move(rows), g);
      default:
        throw std::logic_error("unexpected node kind during execution");
    }
  }

  std::vector<Row> apply_filter(const BgpTreeNode& constraint, std::vector<Row> rows, GraphId g) {
    std::vector<Row> out;
    for (Row& row : rows) {
      bool keep;
      switch (constraint.kind) {
        case NodeKind::Predicate:
          keep = eval_expr(*constraint.predicate, row);
          break;
        case NodeKind::Exists:
          keep = exists_match(constraint.children.at(0)->bgp, row, g);
          break;
        case NodeKind::NotExists:
          keep = !exists_match(constraint.children.at(0)->bgp, row, g);
          break;
        default:
          throw std::logic_error("unexpected FILTER constraint node");
      }
      if (keep) out.push_back(std::move(row));
    }
    return out;
  }

  // ---- BGP matching -----------------------------------------------------

  bool field_matches(const PatternField& f, const Term& value, const Row& row) const {
    if (!is_variable(f)) return as_term(f) == value;
    const auto& bound = row[index_.at(as_variable(f).name)];
    return !bound || *bound == value;
  }

  bool pattern_matches(const TriplePattern& tp, const Triple& t, const Row& row) const {
    return field_matches(tp.subject, t.subject, row) &&
           field_matches(tp.predicate, t.predicate, row) &&
           field_matches(tp.object, t.object, row);
  }

  size_t count_matches(const TriplePattern& tp, const Row& row, GraphId g) const {
    size_t n = 0;
    for (const Triple& t : store_.triples(g)) {
      if (pattern_matches(tp, t, row)) ++n;
    }
    return n;
  }

  void bind_field(const PatternField& f, const Term& value, Row& row) const {
    if (is_variable(f)) row[index_.at(as_variable(f).name)] = value;
  }

  // Backtracking join; at each step the unmatched pattern with the fewest
  // remaining matches is expanded first. first_only short-circuits for EXISTS.
  bool match_rec(const std::vector<TriplePattern>& patterns, std::vector<uint8_t>& used,
                 size_t remaining, Row& row, GraphId g, std::vector<Row>& out,
                 bool first_only) const {
    if (remaining == 0) {
      out.push_back(row);
      return true;
    }
    size_t best = patterns.size();
    size_t best_count = SIZE_MAX;
    for (size_t i = 0; i < patterns.size(); ++i) {
      if (used[i]) continue;
      const size_t c = count_matches(patterns[i], row, g);
      if (c < best_count) {
        best_count = c;
        best = i;
      }
    }
    if (best_count == 0) return false;
    used[best] = 1;
    bool found = false;
    for (const Triple& t : store_.triples(g)) {
      if (!pattern_matches(patterns[best], t, row)) continue;
      Row saved = row;
      bind_field(patterns[best].subject, t.subject, row);
      bind_field(patterns[best].predicate, t.predicate, row);
      bind_field(patterns[best].object, t.object, row);
      if (match_rec(patterns, used, remaining - 1, row, g, out, first_only)) {
        found = true;
        if (first_only) {
          row = std::move(saved);
          break;
        }
      }
      row = std::move(saved);
    }
    used[best] = 0;
    return found;
  }

  void match_bgp(const std::vector<TriplePattern>& patterns, const Row& input, GraphId g,
                 std::vector<Row>& out, bool) const {
    if (patterns.empty()) {
      out.push_back(input);
      return;
    }
    std::vector<uint8_t> used(patterns.size(), 0);
    Row row = input;
    match_rec(patterns, used, patterns.size(), row, g, out, false);
  }

  bool exists_match(const std::vector<TriplePattern>& patterns, const Row& input,
                    GraphId g) const {
    if (patterns.empty()) return true;
    std::vector<uint8_t> used(patterns.size(), 0);
    Row row = input;
    std::vector<Row> sink;
    return match_rec(patterns, used, patterns.size(), row, g, sink, true);
  }

  // ---- Joins ------------------------------------------------------------

  static bool compatible(const Row& a, const Row& b) {
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i] && b[i] && !(*a[i] == *b[i])) return false;
    }
    return true;
  }

  static Row merge(const Row& a, const Row& b) {
    Row out = a;
    for (size_t i = 0; i < b.size(); ++i) {
      if (!out[i]) out[i] = b[i];
    }
    return out;
  }

  static std::vector<Row> inner_join(const std::vector<Row>& left, const std::vector<Row>& right) {
    std::vector<Row> out;
    for (const Row& l : left) {
      for (const Row& r : right) {
        if (compatible(l, r)) out.push_back(merge(l, r));
      }
    }
    return out;
  }

  static std::vector<Row> left_join(const std::vector<Row>& left, const std::vector<Row>& right) {
    std::vector<Row> out;
    for (const Row& l : left) {
      bool any = false;
      for (const Row& r : right) {
        if (compatible(l, r)) {
          out.push_back(merge(l, r));
          any = true;
        }
      }
      if (!any) out.push_back(l);
    }
    return out;
  }

  // ---- Predicates -------------------------------------------------------

  std::optional<Term> operand_value(const PatternField& f, const Row& row) const {
    if (!is_variable(f)) return as_term(f);
    return row[index_.at(as_variable(f).name)];
  }

  bool eval_expr(const PredicateExpr& e, const Row& row) const {
    switch (e.kind) {
      case PredicateExpr::Kind::Bound:
        return static_cast<bool>(row[index_.at(e.var)]);
      case PredicateExpr::Kind::Regex: {
        const auto& v = row[index_.at(e.var)];
        if (!v) return false;
        try {
          return std::regex_search(v->lexical, std::regex(e.regex_text));
        } catch (const std::regex_error& err) {
          throw UnsupportedExpression(std::string("regex: ") + err.what());
        }
      }
      case PredicateExpr::Kind::Compare: break;
    }
    const auto lhs = operand_value(e.lhs, row);
    const auto rhs = operand_value(e.rhs, row);
    if (!lhs || !rhs) return false;  // error on unbound; errors eliminate rows
    double ln, rn;
    const bool numeric = numeric_value(*lhs, ln) && numeric_value(*rhs, rn);
    int cmp;
    if (numeric) {
      cmp = ln < rn ? -1 : (ln > rn ? 1 : 0);
    } else if (e.op == PredicateExpr::Op::Eq || e.op == PredicateExpr::Op::Ne) {
      cmp = (*lhs == *rhs) ? 0 : 1;
    } else {
      cmp = lhs->lexical.compare(rhs->lexical);
      cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    }
    switch (e.op) {
      case PredicateExpr::Op::Eq: return cmp == 0;
      case PredicateExpr::Op::Ne: return cmp != 0;
      case PredicateExpr::Op::Lt: return cmp < 0;
      case PredicateExpr::Op::Le: return cmp <= 0;
      case PredicateExpr::Op::Gt: return cmp > 0;
      case PredicateExpr::Op::Ge: return cmp >= 0;
    }
    return false;
  }

  const Query& q_;
  const GraphStore& store_;
  std::vector<std::string> columns_;
  std::map<std::string, size_t> index_;
};

std::vector<std::string> final_columns(const Query& q) {
  std::vector<std::string> cols;
  if (q.select_all) {
    cols = collect_variables(q);
  } else {
    cols = q.select_vars;
    if (std::find(cols.begin(), cols.end(), q.graph_var) == cols.end())
      cols.push_back(q.graph_var);
  }
  return cols;
}

void project_into(const BindingTable& src, const std::vector<std::string>& columns,
                  BindingTable& dst) {
  std::vector<int64_t> map(columns.size(), -1);
  for (size_t i = 0; i < columns.size(); ++i) {
    auto it = std::find(src.columns.begin(), src.columns.end(), columns[i]);
    if (it != src.columns.end()) map[i] = it - src.columns.begin();
  }
  for (const auto& row : src.rows) {
    Row out(columns.size());
    for (size_t i = 0; i < columns.size(); ++i) {
      if (map[i] >= 0) out[i] = row[static_cast<size_t>(map[i])];
    }
    dst.rows.push_back(std::move(out));
  }
}

void apply_modifiers(const Query& q, BindingTable& table) {
  if (q.distinct) {
    std::vector<Row> kept;
    std::set<std::string> seen;
    for (Row& row : table.rows) {
      std::string key;
      for (const auto& cell : row) {
        key += cell ? serialize_term(*cell) : "\x01";
        key += '\x02';
      }
      if (seen.insert(std::move(key)).second) kept.push_back(std::move(row));
    }
    table.rows = std::move(kept);
  }
  if (q.offset) {
    const size_t skip = std::min<size_t>(*q.offset, table.rows.size());
    table.rows.erase(table.rows.begin(), table.rows.begin() + static_cast<int64_t>(skip));
  }
  if (q.limit && table.rows.size() > *q.limit) table.rows.resize(*q.limit);
}

}  // namespace

BindingTable execute_on_group(const Query& q, const GraphStore& store) {
  return GroupExecutor(q, store).run();
}

BindingTable answer_query(const Query& q, const PvIndex& index, uint32_t workers,
                          FilterStats* stats) {
  CandidateReport report = find_candidates(q, index, workers);
  if (stats) *stats = report.stats;

  BindingTable table;
  table.columns = final_columns(q);

  std::vector<BindingTable> partials(report.candidate_group_ids.size());
  for (size_t i = 0; i < report.candidate_group_ids.size(); ++i) {
    const GraphStore store = index.load_group_quads(report.candidate_group_ids[i]);
    partials[i] = execute_on_group(report.pruned_queries[i], store);
  }
  for (const BindingTable& p : partials) project_into(p, table.columns, table);
  apply_modifiers(q, table);
  return table;
}

std::string format_tsv(const BindingTable& table) {
  std::ostringstream out;
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << "\t";
    out << "?" << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << "\t";
      out << (row[i] ? serialize_term(*row[i]) : "NULL");
    }
    out << "\n";
  }
  return out.str();
}

std::string format_json_rows(const BindingTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj;
    for (size_t i = 0; i < table.columns.size(); ++i) {
      if (row[i]) {
        obj[table.columns[i]] = serialize_term(*row[i]);
      } else {
        obj[table.columns[i]] = nullptr;
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows.dump();
}

}  // namespace riq
