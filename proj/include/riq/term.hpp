#pragma once

#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace riq {

enum class TermKind : uint8_t { Iri, Literal, BlankNode };

// An RDF term. Equality is field-wise on the unescaped forms.
struct Term {
  TermKind kind = TermKind::Iri;
  std::string lexical;                  // IRI text, literal form, or blank label
  std::optional<std::string> datatype;  // literals only
  std::optional<std::string> language;  // literals only, mutually exclusive with datatype

  static Term iri(std::string text);
  static Term literal(std::string form, std::optional<std::string> datatype = std::nullopt,
                      std::optional<std::string> language = std::nullopt);
  static Term blank(std::string label);

  bool is_iri() const { return kind == TermKind::Iri; }
  bool is_literal() const { return kind == TermKind::Literal; }
  bool is_blank() const { return kind == TermKind::BlankNode; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

struct Quad {
  Term subject;
  Term predicate;
  Term object;
  Term context;

  Triple triple() const { return Triple{subject, predicate, object}; }

  friend auto operator<=>(const Quad&, const Quad&) = default;
  friend bool operator==(const Quad&, const Quad&) = default;
};

// A query variable. Names are significant for joins but erased before hashing.
struct Variable {
  std::string name;

  friend auto operator<=>(const Variable&, const Variable&) = default;
  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternField = std::variant<Term, Variable>;

struct TriplePattern {
  PatternField subject;
  PatternField predicate;
  PatternField object;

  friend auto operator<=>(const TriplePattern&, const TriplePattern&) = default;
  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

inline bool is_variable(const PatternField& f) { return std::holds_alternative<Variable>(f); }
inline const Term& as_term(const PatternField& f) { return std::get<Term>(f); }
inline const Variable& as_variable(const PatternField& f) { return std::get<Variable>(f); }

}  // namespace riq
