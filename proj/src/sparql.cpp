#include "riq/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "riq/nquads.hpp"

namespace riq {

SyntaxError::SyntaxError(size_t line, size_t col, const std::string& expected,
                         const std::string& found)
    : std::runtime_error("syntax error at " + std::to_string(line) + ":" + std::to_string(col) +
                         ": expected " + expected + ", found " + found),
      line(line),
      col(col),
      expected(expected),
      found(found) {}

namespace {

constexpr const char* kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
constexpr const char* kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
constexpr const char* kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";

enum class TokType {
  End,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Dot,
  Star,
  Comma,
  Var,      // text = name without '?'
  Iri,      // term
  PName,    // prefix_/local_
  Literal,  // term (string literal, possibly tagged); may still need ^^pname resolution
  Number,   // term (numeric literal)
  Keyword,  // text = uppercased
  Ident,    // text as written
  CmpOp,    // text = operator
};

struct Token {
  TokType type = TokType::End;
  std::string text;
  Term term;
  std::string prefix;  // PName
  std::string local;   // PName
  size_t line = 1;
  size_t col = 1;
};

const char* tok_desc(const Token& t) {
  switch (t.type) {
    case TokType::End: return "end of input";
    case TokType::LBrace: return "'{'";
    case TokType::RBrace: return "'}'";
    case TokType::LParen: return "'('";
    case TokType::RParen: return "')'";
    case TokType::Dot: return "'.'";
    case TokType::Star: return "'*'";
    case TokType::Comma: return "','";
    case TokType::Var: return "variable";
    case TokType::Iri: return "IRI";
    case TokType::PName: return "prefixed name";
    case TokType::Literal: return "literal";
    case TokType::Number: return "number";
    case TokType::Keyword: return "keyword";
    case TokType::Ident: return "identifier";
    case TokType::CmpOp: return "comparison operator";
  }
  return "token";
}

bool is_keyword(const std::string& upper) {
  static const char* kw[] = {"SELECT", "WHERE",  "GRAPH",    "UNION", "OPTIONAL", "FILTER",
                             "EXISTS", "NOT",    "PREFIX",   "LIMIT", "OFFSET",   "DISTINCT"};
  return std::find(std::begin(kw), std::end(kw), upper) != std::end(kw);
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) {}

  std::vector<Token> lex() {
    std::vector<Token> out;
    while (true) {
      skip_ws();
      Token t = next();
      out.push_back(t);
      if (t.type == TokType::End) break;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    std::string found = pos_ < s_.size() ? std::string(1, s_[pos_]) : "end of input";
    throw SyntaxError(line_, col_, expected, "'" + found + "'");
  }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }

  static bool name_start(char c) { return isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool name_char(char c) {
    return isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string read_name() {
    std::string out;
    while (pos_ < s_.size() && name_char(s_[pos_])) {
      out.push_back(s_[pos_]);
      advance();
    }
    return out;
  }

  Token make(TokType type) {
    Token t;
    t.type = type;
    t.line = line_;
    t.col = col_;
    return t;
  }

  Token lex_iri() {
    Token t = make(TokType::Iri);
    advance();  // '<'
    std::string text;
    while (true) {
      if (pos_ >= s_.size()) fail("'>'");
      char c = s_[pos_];
      if (c == '>') {
        advance();
        break;
      }
      if (isspace(static_cast<unsigned char>(c))) fail("'>'");
      text.push_back(c);
      advance();
    }
    t.term = Term::iri(std::move(text));
    return t;
  }

  Token lex_literal() {
    Token t = make(TokType::Literal);
    advance();  // '"'
    std::string form;
    while (true) {
      if (pos_ >= s_.size()) fail("closing '\"'");
      char c = s_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= s_.size()) fail("escape sequence");
        switch (s_[pos_]) {
          case 't': form.push_back('\t'); break;
          case 'n': form.push_back('\n'); break;
          case 'r': form.push_back('\r'); break;
          case '"': form.push_back('"'); break;
          case '\\': form.push_back('\\'); break;
          default: fail("escape sequence");
        }
        advance();
      } else {
        form.push_back(c);
        advance();
      }
    }
    if (peek() == '@') {
      advance();
      std::string lang = read_name();
      if (lang.empty()) fail("language tag");
      t.term = Term::literal(std::move(form), std::nullopt, std::move(lang));
    } else if (peek() == '^' && peek(1) == '^') {
      advance();
      advance();
      if (peek() == '<') {
        Token dt = lex_iri();
        t.term = Term::literal(std::move(form), dt.term.lexical, std::nullopt);
      } else {
        // datatype as prefixed name, resolved by the parser
        std::string prefix = name_start(peek()) ? read_name() : "";
        if (peek() != ':') fail("datatype IRI");
        advance();
        std::string local = read_name();
        t.term = Term::literal(std::move(form));
        t.prefix = std::move(prefix);
        t.local = std::move(local);
        t.text = "dt-pname";
      }
    } else {
      t.term = Term::literal(std::move(form));
    }
    return t;
  }

  Token lex_number() {
    Token t = make(TokType::Number);
    std::string text;
    if (peek() == '+' || peek() == '-') {
      text.push_back(s_[pos_]);
      advance();
    }
    bool has_dot = false, has_exp = false;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (isdigit(static_cast<unsigned char>(c))) {
        text.push_back(c);
        advance();
      } else if (c == '.' && !has_dot && !has_exp && isdigit(static_cast<unsigned char>(peek(1)))) {
        has_dot = true;
        text.push_back(c);
        advance();
      } else if ((c == 'e' || c == 'E') && !has_exp) {
        has_exp = true;
        text.push_back(c);
        advance();
        if (peek() == '+' || peek() == '-') {
          text.push_back(s_[pos_]);
          advance();
        }
      } else {
        break;
      }
    }
    const char* dt = has_exp ? kXsdDouble : (has_dot ? kXsdDecimal : kXsdInteger);
    t.term = Term::literal(std::move(text), std::string(dt), std::nullopt);
    return t;
  }

  Token next() {
    if (pos_ >= s_.size()) return make(TokType::End);
    char c = s_[pos_];
    switch (c) {
      case '{': { Token t = make(TokType::LBrace); advance(); return t; }
      case '}': { Token t = make(TokType::RBrace); advance(); return t; }
      case '(': { Token t = make(TokType::LParen); advance(); return t; }
      case ')': { Token t = make(TokType::RParen); advance(); return t; }
      case '*': { Token t = make(TokType::Star); advance(); return t; }
      case ',': { Token t = make(TokType::Comma); advance(); return t; }
      case '<': {
        if (peek(1) == '=') {
          Token t = make(TokType::CmpOp);
          t.text = "<=";
          advance(); advance();
          return t;
        }
        // '<' followed by a space is a comparison; otherwise an IRI
        if (isspace(static_cast<unsigned char>(peek(1)))) {
          Token t = make(TokType::CmpOp);
          t.text = "<";
          advance();
          return t;
        }
        return lex_iri();
      }
      case '>': {
        Token t = make(TokType::CmpOp);
        t.text = ">";
        advance();
        if (peek() == '=') { t.text = ">="; advance(); }
        return t;
      }
      case '=': { Token t = make(TokType::CmpOp); t.text = "="; advance(); return t; }
      case '!': {
        if (peek(1) != '=') fail("'='");
        Token t = make(TokType::CmpOp);
        t.text = "!=";
        advance(); advance();
        return t;
      }
      case '"': return lex_literal();
      case '?': {
        Token t = make(TokType::Var);
        advance();
        t.text = read_name();
        if (t.text.empty()) fail("variable name");
        return t;
      }
      case '.': {
        if (isdigit(static_cast<unsigned char>(peek(1)))) return lex_number();
        Token t = make(TokType::Dot);
        advance();
        return t;
      }
      case ':': {
        Token t = make(TokType::PName);
        advance();
        t.local = read_name();
        return t;
      }
      default: break;
    }
    if (isdigit(static_cast<unsigned char>(c)) ||
        ((c == '+' || c == '-') && isdigit(static_cast<unsigned char>(peek(1))))) {
      return lex_number();
    }
    if (name_start(c)) {
      Token t = make(TokType::Ident);
      std::string name = read_name();
      if (peek() == ':') {
        advance();
        t.type = TokType::PName;
        t.prefix = std::move(name);
        t.local = read_name();
        return t;
      }
      std::string upper = name;
      std::transform(upper.begin(), upper.end(), upper.begin(),
                     [](unsigned char ch) { return static_cast<char>(toupper(ch)); });
      if (is_keyword(upper)) {
        t.type = TokType::Keyword;
        t.text = std::move(upper);
      } else {
        t.text = std::move(name);
      }
      return t;
    }
    fail("a token");
  }

  const std::string& s_;
  size_t pos_ = 0;
  size_t line_ = 1;
  size_t col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& text, ProductionCounts* productions)
      : tokens_(Lexer(text).lex()), productions_(productions) {}

  Query parse() {
    bump("Query");
    Query q;
    while (at_keyword("PREFIX")) parse_prefix_decl(q);
    expect_keyword("SELECT");
    if (at_keyword("DISTINCT")) {
      next();
      q.distinct = true;
    }
    parse_select_vars(q);
    expect_keyword("WHERE");
    expect(TokType::LBrace);
    expect_keyword("GRAPH");
    q.graph_var = expect(TokType::Var).text;
    expect(TokType::LBrace);
    q.root = parse_group_graph_pattern(q);
    expect(TokType::RBrace);
    expect(TokType::RBrace);
    parse_result_modifiers(q);
    if (peek().type != TokType::End) fail("end of input");
    q.node_count = number_nodes(*q.root);
    return q;
  }

 private:
  void bump(const char* production) {
    if (productions_) ++productions_->counts[production];
  }

  const Token& peek(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  Token next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = tok_desc(t);
    if (!t.text.empty()) found += " '" + t.text + "'";
    throw SyntaxError(t.line, t.col, expected, found);
  }

  Token expect(TokType type) {
    if (peek().type != type) {
      Token probe;
      probe.type = type;
      fail(tok_desc(probe));
    }
    return next();
  }

  bool at_keyword(const char* kw) const {
    return peek().type == TokType::Keyword && peek().text == kw;
  }
  void expect_keyword(const char* kw) {
    if (!at_keyword(kw)) fail(std::string("'") + kw + "'");
    next();
  }

  void parse_prefix_decl(Query& q) {
    bump("PrefixDecl");
    next();  // PREFIX
    Token name = expect(TokType::PName);
    if (!name.local.empty()) fail("prefix declaration ending in ':'");
    Token iri = expect(TokType::Iri);
    q.prefixes[name.prefix] = iri.term.lexical;
  }

  void parse_select_vars(Query& q) {
    if (peek().type == TokType::Star) {
      next();
      q.select_all = true;
      return;
    }
    while (peek().type == TokType::Var) q.select_vars.push_back(next().text);
    if (!q.select_all && q.select_vars.empty()) fail("'*' or at least one variable");
  }

  void parse_result_modifiers(Query& q) {
    bump("ResultModifiers");
    while (true) {
      if (at_keyword("LIMIT")) {
        next();
        q.limit = parse_nonneg_int();
      } else if (at_keyword("OFFSET")) {
        next();
        q.offset = parse_nonneg_int();
      } else if (at_keyword("DISTINCT")) {
        next();
        q.distinct = true;
      } else {
        break;
      }
    }
  }

  uint64_t parse_nonneg_int() {
    Token t = expect(TokType::Number);
    if (t.term.datatype != kXsdInteger || t.term.lexical.starts_with('-'))
      fail("non-negative integer");
    return std::stoull(t.term.lexical);
  }

  Term resolve_pname(const Token& t, const Query& q) {
    auto it = q.prefixes.find(t.prefix);
    if (it == q.prefixes.end())
      throw SyntaxError(t.line, t.col, "declared prefix", "'" + t.prefix + ":'");
    return Term::iri(it->second + t.local);
  }

  bool at_term_start() const {
    switch (peek().type) {
      case TokType::Var:
      case TokType::Iri:
      case TokType::PName:
      case TokType::Literal:
      case TokType::Number:
        return true;
      default:
        return false;
    }
  }

  PatternField parse_pattern_field(Query& q) {
    Token t = next();
    switch (t.type) {
      case TokType::Var: return Variable{t.text};
      case TokType::Iri: return t.term;
      case TokType::PName: return resolve_pname(t, q);
      case TokType::Number: return t.term;
      case TokType::Literal:
        if (t.text == "dt-pname") {
          Term dt = resolve_pname(t, q);
          t.term.datatype = dt.lexical;
        }
        return t.term;
      default: fail("a term or variable");
    }
  }

  std::unique_ptr<BgpTreeNode> parse_bgp(Query& q) {
    bump("BGP");
    auto node = std::make_unique<BgpTreeNode>();
    node->kind = NodeKind::Bgp;
    while (at_term_start()) {
      bump("TriplePattern");
      TriplePattern tp;
      tp.subject = parse_pattern_field(q);
      tp.predicate = parse_pattern_field(q);
      tp.object = parse_pattern_field(q);
      if (std::find(node->bgp.begin(), node->bgp.end(), tp) == node->bgp.end())
        node->bgp.push_back(std::move(tp));
      if (peek().type == TokType::Dot) {
        next();
      } else {
        break;  // a pattern list ends without a dot only before '}' or a block
      }
    }
    return node;
  }

  std::unique_ptr<BgpTreeNode> parse_braced_group(Query& q) {
    expect(TokType::LBrace);
    auto g = parse_group_graph_pattern(q);
    expect(TokType::RBrace);
    return g;
  }

  std::unique_ptr<BgpTreeNode> parse_group_or_union(Query& q) {
    bump("GroupOrUnionGraphPattern");
    auto node = std::make_unique<BgpTreeNode>();
    node->kind = NodeKind::GroupOrUnionGraphPattern;
    node->children.push_back(parse_braced_group(q));
    while (at_keyword("UNION")) {
      next();
      node->children.push_back(parse_braced_group(q));
    }
    return node;
  }

  std::unique_ptr<BgpTreeNode> parse_optional(Query& q) {
    bump("OptionalGraphPattern");
    next();  // OPTIONAL
    auto node = std::make_unique<BgpTreeNode>();
    node->kind = NodeKind::OptionalGraphPattern;
    node->children.push_back(parse_braced_group(q));
    return node;
  }

  PatternField parse_operand(Query& q) {
    if (!at_term_start() || peek().type == TokType::PName) {
      if (peek().type == TokType::PName) return parse_pattern_field(q);
      fail("a variable or literal");
    }
    return parse_pattern_field(q);
  }

  std::shared_ptr<PredicateExpr> parse_predicate_expr(Query& q) {
    auto expr = std::make_shared<PredicateExpr>();
    if (peek().type == TokType::Ident) {
      Token fn = next();
      std::string lower = fn.text;
      std::transform(lower.begin(), lower.end(), lower.begin(),
                     [](unsigned char ch) { return static_cast<char>(tolower(ch)); });
      if (lower == "regex") {
        expr->kind = PredicateExpr::Kind::Regex;
        expect(TokType::LParen);
        expr->var = expect(TokType::Var).text;
        expect(TokType::Comma);
        Token pat = expect(TokType::Literal);
        expr->regex_text = pat.term.lexical;
        expect(TokType::RParen);
        return expr;
      }
      if (lower == "bound") {
        expr->kind = PredicateExpr::Kind::Bound;
        expect(TokType::LParen);
        expr->var = expect(TokType::Var).text;
        expect(TokType::RParen);
        return expr;
      }
      throw SyntaxError(fn.line, fn.col, "'regex' or 'bound'", "'" + fn.text + "'");
    }
    expr->kind = PredicateExpr::Kind::Compare;
    expr->lhs = parse_operand(q);
    Token op = expect(TokType::CmpOp);
    if (op.text == "=") expr->op = PredicateExpr::Op::Eq;
    else if (op.text == "!=") expr->op = PredicateExpr::Op::Ne;
    else if (op.text == "<") expr->op = PredicateExpr::Op::Lt;
    else if (op.text == "<=") expr->op = PredicateExpr::Op::Le;
    else if (op.text == ">") expr->op = PredicateExpr::Op::Gt;
    else expr->op = PredicateExpr::Op::Ge;
    expr->rhs = parse_operand(q);
    return expr;
  }

  std::unique_ptr<BgpTreeNode> parse_filter(Query& q) {
    bump("Filter");
    next();  // FILTER
    auto node = std::make_unique<BgpTreeNode>();
    node->kind = NodeKind::Filter;
    if (at_keyword("EXISTS") || (at_keyword("NOT"))) {
      const bool negated = at_keyword("NOT");
      bump(negated ? "Constraint.NotExists" : "Constraint.Exists");
      next();
      if (negated) expect_keyword("EXISTS");
      auto quant = std::make_unique<BgpTreeNode>();
      quant->kind = negated ? NodeKind::NotExists : NodeKind::Exists;
      expect(TokType::LBrace);
      quant->children.push_back(parse_bgp(q));
      expect(TokType::RBrace);
      node->children.push_back(std::move(quant));
      return node;
    }
    bump("Constraint.Predicate");
    auto pred = std::make_unique<BgpTreeNode>();
    pred->kind = NodeKind::Predicate;
    if (peek().type == TokType::LParen) {
      next();
      pred->predicate = parse_predicate_expr(q);
      expect(TokType::RParen);
    } else {
      pred->predicate = parse_predicate_expr(q);
    }
    node->children.push_back(std::move(pred));
    return node;
  }

  std::unique_ptr<BgpTreeNode> parse_group_graph_pattern(Query& q) {
    bump("GroupGraphPattern");
    auto node = std::make_unique<BgpTreeNode>();
    node->kind = NodeKind::GroupGraphPattern;
    while (true) {
      if (peek().type == TokType::Dot) {
        next();  // separator between blocks
        continue;
      }
      if (peek().type == TokType::RBrace || peek().type == TokType::End) break;
      if (at_term_start()) {
        node->children.push_back(parse_bgp(q));
        continue;
      }
      bump("GraphPatternNotTriples");
      if (peek().type == TokType::LBrace) {
        node->children.push_back(parse_group_or_union(q));
      } else if (at_keyword("OPTIONAL")) {
        node->children.push_back(parse_optional(q));
      } else if (at_keyword("FILTER")) {
        node->children.push_back(parse_filter(q));
      } else {
        fail("a triple pattern, '{', 'OPTIONAL', 'FILTER', or '}'");
      }
    }
    return node;
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  ProductionCounts* productions_;
};

void number_nodes_rec(BgpTreeNode& node, uint32_t& next_id) {
  node.id = next_id++;
  for (auto& c : node.children) number_nodes_rec(*c, next_id);
}

bool expr_equal(const PredicateExpr* a, const PredicateExpr* b) {
  if (!a || !b) return a == b;
  return a->kind == b->kind && a->op == b->op && a->lhs == b->lhs && a->rhs == b->rhs &&
         a->var == b->var && a->regex_text == b->regex_text;
}

void format_term(const Term& t, std::ostream& out) { out << serialize_term(t); }

void format_field(const PatternField& f, std::ostream& out) {
  if (is_variable(f)) {
    out << "?" << as_variable(f).name;
  } else {
    format_term(as_term(f), out);
  }
}

void format_expr(const PredicateExpr& e, std::ostream& out) {
  switch (e.kind) {
    case PredicateExpr::Kind::Regex:
      out << "regex(?" << e.var << ", ";
      format_term(Term::literal(e.regex_text), out);
      out << ")";
      return;
    case PredicateExpr::Kind::Bound:
      out << "bound(?" << e.var << ")";
      return;
    case PredicateExpr::Kind::Compare: break;
  }
  out << "(";
  format_field(e.lhs, out);
  switch (e.op) {
    case PredicateExpr::Op::Eq: out << " = "; break;
    case PredicateExpr::Op::Ne: out << " != "; break;
    case PredicateExpr::Op::Lt: out << " < "; break;
    case PredicateExpr::Op::Le: out << " <= "; break;
    case PredicateExpr::Op::Gt: out << " > "; break;
    case PredicateExpr::Op::Ge: out << " >= "; break;
  }
  format_field(e.rhs, out);
  out << ")";
}

void format_node(const BgpTreeNode& node, std::ostream& out) {
  switch (node.kind) {
    case NodeKind::GroupGraphPattern: {
      bool first = true;
      for (const auto& c : node.children) {
        if (!first) out << " ";
        first = false;
        format_node(*c, out);
      }
      break;
    }
    case NodeKind::Bgp: {
      bool first = true;
      for (const TriplePattern& tp : node.bgp) {
        if (!first) out << " ";
        first = false;
        format_field(tp.subject, out);
        out << " ";
        format_field(tp.predicate, out);
        out << " ";
        format_field(tp.object, out);
        out << " .";
      }
      break;
    }
    case NodeKind::GroupOrUnionGraphPattern: {
      bool first = true;
      for (const auto& c : node.children) {
        if (!first) out << " UNION ";
        first = false;
        out << "{ ";
        format_node(*c, out);
        out << " }";
      }
      out << " .";
      break;
    }
    case NodeKind::OptionalGraphPattern:
      out << "OPTIONAL { ";
      format_node(*node.children.at(0), out);
      out << " } .";
      break;
    case NodeKind::Filter:
      out << "FILTER ";
      format_node(*node.children.at(0), out);
      out << " .";
      break;
    case NodeKind::Predicate:
      format_expr(*node.predicate, out);
      break;
    case NodeKind::Exists:
    case NodeKind::NotExists:
      out << (node.kind == NodeKind::Exists ? "EXISTS { " : "NOT EXISTS { ");
      format_node(*node.children.at(0), out);
      out << " }";
      break;
  }
}

void collect_vars_node(const BgpTreeNode& node, std::vector<std::string>& out) {
  auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  auto add_field = [&](const PatternField& f) {
    if (is_variable(f)) add(as_variable(f).name);
  };
  for (const TriplePattern& tp : node.bgp) {
    add_field(tp.subject);
    add_field(tp.predicate);
    add_field(tp.object);
  }
  if (node.predicate) {
    if (node.predicate->kind == PredicateExpr::Kind::Compare) {
      add_field(node.predicate->lhs);
      add_field(node.predicate->rhs);
    } else {
      add(node.predicate->var);
    }
  }
  for (const auto& c : node.children) collect_vars_node(*c, out);
}

}  // namespace

std::unique_ptr<BgpTreeNode> BgpTreeNode::clone() const {
  auto copy = std::make_unique<BgpTreeNode>();
  copy->kind = kind;
  copy->id = id;
  copy->bgp = bgp;
  copy->predicate = predicate;
  copy->children.reserve(children.size());
  for (const auto& c : children) copy->children.push_back(c->clone());
  return copy;
}

Query Query::clone() const {
  Query q;
  q.select_all = select_all;
  q.select_vars = select_vars;
  q.graph_var = graph_var;
  q.root = root ? root->clone() : nullptr;
  q.distinct = distinct;
  q.limit = limit;
  q.offset = offset;
  q.prefixes = prefixes;
  q.node_count = node_count;
  return q;
}

uint32_t number_nodes(BgpTreeNode& root) {
  uint32_t next_id = 0;
  number_nodes_rec(root, next_id);
  return next_id;
}

Query parse_query(const std::string& text, ProductionCounts* productions) {
  return Parser(text, productions).parse();
}

std::string format_query(const Query& q) {
  std::ostringstream out;
  out << "SELECT ";
  if (q.distinct) out << "DISTINCT ";
  if (q.select_all) {
    out << "*";
  } else {
    bool first = true;
    for (const std::string& v : q.select_vars) {
      if (!first) out << " ";
      first = false;
      out << "?" << v;
    }
  }
  out << " WHERE { GRAPH ?" << q.graph_var << " { ";
  format_node(*q.root, out);
  out << " } }";
  if (q.limit) out << " LIMIT " << *q.limit;
  if (q.offset) out << " OFFSET " << *q.offset;
  return out.str();
}

bool tree_equal(const BgpTreeNode& a, const BgpTreeNode& b) {
  if (a.kind != b.kind || a.bgp != b.bgp) return false;
  if (!expr_equal(a.predicate.get(), b.predicate.get())) return false;
  if (a.children.size() != b.children.size()) return false;
  for (size_t i = 0; i < a.children.size(); ++i) {
    if (!tree_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

bool query_equal(const Query& a, const Query& b) {
  return a.select_all == b.select_all && a.select_vars == b.select_vars &&
         a.graph_var == b.graph_var && a.distinct == b.distinct && a.limit == b.limit &&
         a.offset == b.offset && tree_equal(*a.root, *b.root);
}

void collect_bgps(const BgpTreeNode& node, std::vector<const BgpTreeNode*>& out) {
  if (node.kind == NodeKind::Bgp) out.push_back(&node);
  for (const auto& c : node.children) collect_bgps(*c, out);
}

std::vector<std::string> collect_variables(const Query& q) {
  std::vector<std::string> vars;
  vars.push_back(q.graph_var);
  collect_vars_node(*q.root, vars);
  return vars;
}

}  // namespace riq
