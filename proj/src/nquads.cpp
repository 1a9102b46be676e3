#include "riq/nquads.hpp"

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>

namespace riq {

Term Term::iri(std::string text) { return Term{TermKind::Iri, std::move(text), {}, {}}; }

Term Term::literal(std::string form, std::optional<std::string> datatype,
                   std::optional<std::string> language) {
  return Term{TermKind::Literal, std::move(form), std::move(datatype), std::move(language)};
}

Term Term::blank(std::string label) { return Term{TermKind::BlankNode, std::move(label), {}, {}}; }

namespace {

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class LineParser {
 public:
  LineParser(const std::string& line, size_t line_no) : s_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& reason) const { throw NQuadsError(line_no_, reason); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void expect(char c, const char* what) {
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected ") + what);
    ++pos_;
  }

  uint32_t hex_escape(int digits) {
    uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      if (pos_ >= s_.size()) fail("truncated \\u escape");
      char c = s_[pos_++];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= static_cast<uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') cp |= static_cast<uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') cp |= static_cast<uint32_t>(c - 'A' + 10);
      else fail("bad hex digit in escape");
    }
    return cp;
  }

  // Shared by IRIs and literals; string-only escapes rejected inside IRIs.
  void unescape_into(std::string& out, bool in_literal) {
    ++pos_;  // consume backslash
    if (pos_ >= s_.size()) fail("trailing backslash");
    char c = s_[pos_++];
    switch (c) {
      case 'u': append_utf8(out, hex_escape(4)); return;
      case 'U': append_utf8(out, hex_escape(8)); return;
      default: break;
    }
    if (!in_literal) fail("escape not allowed in IRI");
    switch (c) {
      case 't': out.push_back('\t'); break;
      case 'b': out.push_back('\b'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 'f': out.push_back('\f'); break;
      case '"': out.push_back('"'); break;
      case '\'': out.push_back('\''); break;
      case '\\': out.push_back('\\'); break;
      default: fail("unknown escape sequence");
    }
  }

  Term parse_iri() {
    expect('<', "'<'");
    std::string text;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated IRI");
      char c = s_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        unescape_into(text, false);
      } else if (static_cast<unsigned char>(c) <= 0x20) {
        fail("whitespace in IRI");
      } else {
        text.push_back(c);
        ++pos_;
      }
    }
    if (text.empty()) fail("empty IRI");
    return Term::iri(std::move(text));
  }

  Term parse_blank() {
    if (pos_ + 1 >= s_.size() || s_[pos_] != '_' || s_[pos_ + 1] != ':') fail("expected blank node");
    pos_ += 2;
    std::string label;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == ' ' || c == '\t') break;
      if (c == '.' && (pos_ + 1 >= s_.size() || s_[pos_ + 1] == ' ' || s_[pos_ + 1] == '\t')) break;
      label.push_back(c);
      ++pos_;
    }
    if (label.empty()) fail("empty blank node label");
    return Term::blank(std::move(label));
  }

  Term parse_literal() {
    expect('"', "'\"'");
    std::string form;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated literal");
      char c = s_[pos_];
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        unescape_into(form, true);
      } else {
        form.push_back(c);
        ++pos_;
      }
    }
    if (peek() == '@') {
      ++pos_;
      std::string lang;
      while (pos_ < s_.size()) {
        char c = s_[pos_];
        if (!isalnum(static_cast<unsigned char>(c)) && c != '-') break;
        lang.push_back(c);
        ++pos_;
      }
      if (lang.empty()) fail("empty language tag");
      return Term::literal(std::move(form), std::nullopt, std::move(lang));
    }
    if (pos_ + 1 < s_.size() && s_[pos_] == '^' && s_[pos_ + 1] == '^') {
      pos_ += 2;
      Term dt = parse_iri();
      return Term::literal(std::move(form), std::move(dt.lexical), std::nullopt);
    }
    return Term::literal(std::move(form));
  }

  Term parse_term() {
    skip_ws();
    switch (peek()) {
      case '<': return parse_iri();
      case '_': return parse_blank();
      case '"': return parse_literal();
      default: fail("expected IRI, blank node, or literal");
    }
  }

  // Returns the terms of the statement (3 or 4).
  std::vector<Term> parse_statement() {
    std::vector<Term> terms;
    while (true) {
      skip_ws();
      if (peek() == '.') {
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] != '#') fail("trailing content after '.'");
        break;
      }
      if (pos_ >= s_.size()) fail("statement not terminated by '.'");
      if (terms.size() == 4) fail("too many terms in statement");
      terms.push_back(parse_term());
    }
    return terms;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;
  size_t line_no_;
};

Quad quad_from_terms(std::vector<Term>&& terms, const NQuadsOptions& opts, size_t line_no) {
  if (terms.size() == 3) {
    if (!opts.default_graph) throw NQuadsError(line_no, "triple line without a default graph");
    terms.push_back(Term::iri(*opts.default_graph));
  }
  if (terms.size() != 4) throw NQuadsError(line_no, "expected 3 or 4 terms");
  if (terms[0].is_literal()) throw NQuadsError(line_no, "literal subject");
  if (!terms[1].is_iri()) throw NQuadsError(line_no, "predicate must be an IRI");
  if (terms[3].is_literal()) throw NQuadsError(line_no, "literal context");
  return Quad{std::move(terms[0]), std::move(terms[1]), std::move(terms[2]), std::move(terms[3])};
}

bool blank_line(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace

void parse_nquads_stream(std::istream& input, const NQuadsOptions& opts,
                         const std::function<void(Quad&&, size_t)>& sink,
                         std::vector<MalformedLine>* errors) {
  std::string line;
  size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank_line(line)) continue;
    try {
      LineParser p(line, line_no);
      sink(quad_from_terms(p.parse_statement(), opts, line_no), line_no);
    } catch (const NQuadsError& e) {
      if (opts.strict) throw;
      if (errors) errors->push_back({e.line_no, e.what()});
    }
  }
}

ParsedQuads parse_nquads(std::istream& input, const NQuadsOptions& opts) {
  ParsedQuads result;
  parse_nquads_stream(
      input, opts, [&](Quad&& q, size_t) { result.quads.push_back(std::move(q)); },
      &result.errors);
  return result;
}

ParsedQuads parse_nquads(const std::string& text, const NQuadsOptions& opts) {
  std::istringstream in(text);
  return parse_nquads(in, opts);
}

Term parse_term_text(const std::string& text) {
  LineParser p(text, 1);
  Term t = p.parse_term();
  if (!p.at_end()) throw NQuadsError(1, "trailing content after term");
  return t;
}

namespace {

void escape_iri(const std::string& text, std::string& out) {
  char buf[8];
  for (unsigned char c : text) {
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`' || c == '\\') {
      snprintf(buf, sizeof buf, "\\u%04X", c);
      out += buf;
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
}

void escape_literal(const std::string& text, std::string& out) {
  char buf[8];
  for (unsigned char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          snprintf(buf, sizeof buf, "\\u%04X", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
}

}  // namespace

std::string serialize_term(const Term& t) {
  std::string out;
  switch (t.kind) {
    case TermKind::Iri:
      out.push_back('<');
      escape_iri(t.lexical, out);
      out.push_back('>');
      break;
    case TermKind::BlankNode:
      out += "_:";
      out += t.lexical;
      break;
    case TermKind::Literal:
      out.push_back('"');
      escape_literal(t.lexical, out);
      out.push_back('"');
      if (t.language) {
        out.push_back('@');
        out += *t.language;
      } else if (t.datatype) {
        out += "^^<";
        escape_iri(*t.datatype, out);
        out.push_back('>');
      }
      break;
  }
  return out;
}

std::string serialize_quad(const Quad& q) {
  return serialize_term(q.subject) + " " + serialize_term(q.predicate) + " " +
         serialize_term(q.object) + " " + serialize_term(q.context) + " .";
}

void serialize_nquads(const std::vector<Quad>& quads, std::ostream& out) {
  for (const Quad& q : quads) out << serialize_quad(q) << "\n";
}

std::string serialize_nquads(const std::vector<Quad>& quads) {
  std::ostringstream out;
  serialize_nquads(quads, out);
  return out.str();
}

}  // namespace riq
