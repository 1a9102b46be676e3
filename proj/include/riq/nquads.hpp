#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riq/term.hpp"

namespace riq {

struct MalformedLine {
  size_t line_no;
  std::string reason;
};

struct NQuadsOptions {
  bool strict = false;  // abort on the first malformed line
  // Context assigned to 3-term lines; absent, such lines are malformed.
  std::optional<std::string> default_graph;
};

class NQuadsError : public std::runtime_error {
 public:
  NQuadsError(size_t line_no, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + reason), line_no(line_no) {}
  size_t line_no;
};

struct ParsedQuads {
  std::vector<Quad> quads;
  std::vector<MalformedLine> errors;  // lenient mode only
};

ParsedQuads parse_nquads(std::istream& input, const NQuadsOptions& opts = {});
ParsedQuads parse_nquads(const std::string& text, const NQuadsOptions& opts = {});

// Streaming variant; the sink is called once per well-formed statement.
void parse_nquads_stream(std::istream& input, const NQuadsOptions& opts,
                         const std::function<void(Quad&&, size_t line_no)>& sink,
                         std::vector<MalformedLine>* errors = nullptr);

// Parses a single N-Quads term (IRI, literal, or blank node).
Term parse_term_text(const std::string& text);

std::string serialize_term(const Term& t);
std::string serialize_quad(const Quad& q);
void serialize_nquads(const std::vector<Quad>& quads, std::ostream& out);
std::string serialize_nquads(const std::vector<Quad>& quads);

}  // namespace riq
