#include "reference_eval.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>

#include "riq/nquads.hpp"

namespace riqtest {

namespace {

using riq::BgpTreeNode;
using riq::NodeKind;
using riq::PatternField;
using riq::PredicateExpr;
using riq::Term;
using riq::TriplePattern;

using Row = std::vector<std::optional<Term>>;
using Rows = std::vector<Row>;

struct Ctx {
  std::vector<std::string> vars;
  std::map<std::string, size_t> slot;
  const std::vector<riq::Triple>* triples = nullptr;
};

bool is_numeric_literal(const Term& t, double& out) {
  static const std::set<std::string> kNumeric = {
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
  if (!t.is_literal() || !t.datatype || !kNumeric.count(*t.datatype)) return false;
  char* end = nullptr;
  out = std::strtod(t.lexical.c_str(), &end);
  return end && *end == '\0' && end != t.lexical.c_str();
}

bool field_ok(const Ctx& ctx, const PatternField& f, const Term& value, const Row& row) {
  if (!riq::is_variable(f)) return riq::as_term(f) == value;
  const auto& bound = row[ctx.slot.at(riq::as_variable(f).name)];
  return !bound || *bound == value;
}

void bind(const Ctx& ctx, const PatternField& f, const Term& value, Row& row) {
  if (riq::is_variable(f)) row[ctx.slot.at(riq::as_variable(f).name)] = value;
}

// Left-to-right nested loops over the triple patterns, no reordering.
void bgp_solutions(const Ctx& ctx, const std::vector<TriplePattern>& patterns, size_t i, Row& row,
                   Rows& out, bool first_only, bool& found) {
  if (first_only && found) return;
  if (i == patterns.size()) {
    out.push_back(row);
    found = true;
    return;
  }
  const TriplePattern& tp = patterns[i];
  for (const riq::Triple& t : *ctx.triples) {
    if (!field_ok(ctx, tp.subject, t.subject, row) || !field_ok(ctx, tp.predicate, t.predicate, row) ||
        !field_ok(ctx, tp.object, t.object, row))
      continue;
    Row saved = row;
    bind(ctx, tp.subject, t.subject, row);
    bind(ctx, tp.predicate, t.predicate, row);
    bind(ctx, tp.object, t.object, row);
    bgp_solutions(ctx, patterns, i + 1, row, out, first_only, found);
    row = std::move(saved);
    if (first_only && found) return;
  }
}

bool rows_compatible(const Row& a, const Row& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i] && !(*a[i] == *b[i])) return false;
  }
  return true;
}

Row merge_rows(const Row& a, const Row& b) {
  Row out = a;
  for (size_t i = 0; i < b.size(); ++i) {
    if (!out[i]) out[i] = b[i];
  }
  return out;
}

std::optional<Term> operand(const Ctx& ctx, const PatternField& f, const Row& row) {
  if (!riq::is_variable(f)) return riq::as_term(f);
  return row[ctx.slot.at(riq::as_variable(f).name)];
}

bool predicate_holds(const Ctx& ctx, const PredicateExpr& e, const Row& row) {
  if (e.kind == PredicateExpr::Kind::Bound) return static_cast<bool>(row[ctx.slot.at(e.var)]);
  if (e.kind == PredicateExpr::Kind::Regex) {
    const auto& v = row[ctx.slot.at(e.var)];
    return v && std::regex_search(v->lexical, std::regex(e.regex_text));
  }
  const auto lhs = operand(ctx, e.lhs, row);
  const auto rhs = operand(ctx, e.rhs, row);
  if (!lhs || !rhs) return false;
  double ln, rn;
  int cmp;
  if (is_numeric_literal(*lhs, ln) && is_numeric_literal(*rhs, rn)) {
    cmp = ln < rn ? -1 : (ln > rn ? 1 : 0);
  } else if (e.op == PredicateExpr::Op::Eq || e.op == PredicateExpr::Op::Ne) {
    cmp = (*lhs == *rhs) ? 0 : 1;
  } else {
    const int c = lhs->lexical.compare(rhs->lexical);
    cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
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

Rows eval_group(const Ctx& ctx, const BgpTreeNode& node, Rows rows);

Rows apply_node(const Ctx& ctx, const BgpTreeNode& node, Rows rows) {
  switch (node.kind) {
    case NodeKind::Bgp: {
      Rows out;
      for (Row& row : rows) {
        bool found = false;
        bgp_solutions(ctx, node.bgp, 0, row, out, false, found);
      }
      return out;
    }
    case NodeKind::OptionalGraphPattern: {
      const Rows right = eval_group(ctx, *node.children.at(0), {Row(ctx.vars.size())});
      Rows out;
      for (const Row& l : rows) {
        bool any = false;
        for (const Row& r : right) {
          if (rows_compatible(l, r)) {
            out.push_back(merge_rows(l, r));
            any = true;
          }
        }
        if (!any) out.push_back(l);
      }
      return out;
    }
    case NodeKind::GroupOrUnionGraphPattern: {
      Rows merged;
      for (const auto& branch : node.children) {
        Rows r = eval_group(ctx, *branch, {Row(ctx.vars.size())});
        merged.insert(merged.end(), r.begin(), r.end());
      }
      Rows out;
      for (const Row& l : rows) {
        for (const Row& r : merged) {
          if (rows_compatible(l, r)) out.push_back(merge_rows(l, r));
        }
      }
      return out;
    }
    case NodeKind::Filter: {
      const BgpTreeNode& c = *node.children.at(0);
      Rows out;
      for (Row& row : rows) {
        bool keep = false;
        if (c.kind == NodeKind::Predicate) {
          keep = predicate_holds(ctx, *c.predicate, row);
        } else {
          Rows sink;
          bool found = false;
          Row probe = row;
          bgp_solutions(ctx, c.children.at(0)->bgp, 0, probe, sink, true, found);
          keep = (c.kind == NodeKind::Exists) ? found : !found;
        }
        if (keep) out.push_back(std::move(row));
      }
      return out;
    }
    default:
      throw std::logic_error("reference evaluator: unexpected node kind");
  }
}

Rows eval_group(const Ctx& ctx, const BgpTreeNode& node, Rows rows) {
  for (const auto& child : node.children) rows = apply_node(ctx, *child, std::move(rows));
  return rows;
}

std::string row_key(const Row& row) {
  std::string key;
  for (const auto& cell : row) {
    key += cell ? riq::serialize_term(*cell) : "\x01";
    key += '\x02';
  }
  return key;
}

}  // namespace

OracleResult oracle_answer(const riq::Query& q, const std::vector<riq::Quad>& quads) {
  Ctx ctx;
  ctx.vars = riq::collect_variables(q);
  for (size_t i = 0; i < ctx.vars.size(); ++i) ctx.slot[ctx.vars[i]] = i;

  // Bindings never cross named graphs: evaluate per context.
  std::vector<Term> contexts;
  std::map<Term, std::vector<riq::Triple>> by_context;
  for (const riq::Quad& quad : quads) {
    auto [it, inserted] = by_context.try_emplace(quad.context);
    if (inserted) contexts.push_back(quad.context);
    const riq::Triple t = quad.triple();
    if (std::find(it->second.begin(), it->second.end(), t) == it->second.end())
      it->second.push_back(t);
  }

  Rows all;
  for (const Term& c : contexts) {
    ctx.triples = &by_context.at(c);
    Row seed(ctx.vars.size());
    seed[ctx.slot.at(q.graph_var)] = c;
    Rows rows = eval_group(ctx, *q.root, {std::move(seed)});
    all.insert(all.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }

  OracleResult out;
  if (q.select_all) {
    out.columns = ctx.vars;
  } else {
    out.columns = q.select_vars;
    if (std::find(out.columns.begin(), out.columns.end(), q.graph_var) == out.columns.end())
      out.columns.push_back(q.graph_var);
  }
  for (const Row& row : all) {
    Row proj(out.columns.size());
    for (size_t i = 0; i < out.columns.size(); ++i) proj[i] = row[ctx.slot.at(out.columns[i])];
    out.rows.push_back(std::move(proj));
  }
  if (q.distinct) {
    std::set<std::string> seen;
    Rows kept;
    for (Row& row : out.rows) {
      if (seen.insert(row_key(row)).second) kept.push_back(std::move(row));
    }
    out.rows = std::move(kept);
  }
  return out;
}

bool results_agree(const riq::Query& q, const riq::BindingTable& engine,
                   const OracleResult& oracle, std::string* why) {
  auto complain = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (engine.columns != oracle.columns) return complain("column lists differ");

  std::multiset<std::string> expected;
  for (const auto& row : oracle.rows) expected.insert(row_key(row));

  if (!q.limit && !q.offset) {
    std::multiset<std::string> got;
    for (const auto& row : engine.rows) got.insert(row_key(row));
    if (got != expected)
      return complain("row bags differ: engine " + std::to_string(got.size()) + ", oracle " +
                      std::to_string(expected.size()));
    return true;
  }

  size_t n = oracle.rows.size();
  const size_t skip = q.offset ? std::min<size_t>(*q.offset, n) : 0;
  n -= skip;
  if (q.limit) n = std::min<size_t>(n, *q.limit);
  if (engine.rows.size() != n)
    return complain("modified cardinality " + std::to_string(engine.rows.size()) + " != " +
                    std::to_string(n));
  for (const auto& row : engine.rows) {
    auto it = expected.find(row_key(row));
    if (it == expected.end()) return complain("engine row not produced by the oracle");
    expected.erase(it);
  }
  return true;
}

}  // namespace riqtest
