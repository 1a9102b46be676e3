#include <string>
#include <vector>

#include "doctest.h"
#include "riq/sparql.hpp"

namespace {

using namespace riq;

const char* kMovieQuery = R"(PREFIX movie: <http://data.linkedmdb.org/resource/movie/>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
PREFIX foaf: <http://xmlns.com/foaf/0.1/>
SELECT ?g ?producer ?name ?label ?page ?film WHERE {
  GRAPH ?g { ?producer movie:producer_name ?name .
             ?producer rdfs:label ?label .
             OPTIONAL { ?producer foaf:page ?page . } .
             ?film movie:producer ?producer .  } }
)";

Query parse(const std::string& text) { return parse_query(text); }

}  // namespace

TEST_SUITE("sparql") {

TEST_CASE("parses a multi-block query with prefixes and OPTIONAL") {
  ProductionCounts counts;
  const Query q = parse_query(kMovieQuery, &counts);
  CHECK(!q.select_all);
  CHECK(q.select_vars == std::vector<std::string>{"g", "producer", "name", "label", "page", "film"});
  CHECK(q.graph_var == "g");
  CHECK(q.prefixes.size() == 3);

  // Root group: BGP (2 patterns), OPTIONAL, BGP (1 pattern).
  REQUIRE(q.root->kind == NodeKind::GroupGraphPattern);
  REQUIRE(q.root->children.size() == 3);
  const BgpTreeNode& bgp1 = *q.root->children[0];
  REQUIRE(bgp1.kind == NodeKind::Bgp);
  REQUIRE(bgp1.bgp.size() == 2);
  CHECK(as_term(bgp1.bgp[0].predicate) ==
        Term::iri("http://data.linkedmdb.org/resource/movie/producer_name"));
  CHECK(as_variable(bgp1.bgp[0].subject).name == "producer");

  const BgpTreeNode& opt = *q.root->children[1];
  REQUIRE(opt.kind == NodeKind::OptionalGraphPattern);
  REQUIRE(opt.children.size() == 1);
  CHECK(opt.children[0]->kind == NodeKind::GroupGraphPattern);

  const BgpTreeNode& bgp2 = *q.root->children[2];
  REQUIRE(bgp2.kind == NodeKind::Bgp);
  CHECK(as_term(bgp2.bgp[0].predicate) ==
        Term::iri("http://data.linkedmdb.org/resource/movie/producer"));

  CHECK(counts["PrefixDecl"] == 3);
  CHECK(counts["OptionalGraphPattern"] == 1);
  CHECK(counts["TriplePattern"] == 4);
  CHECK(counts["GroupGraphPattern"] == 2);

  // ids are a dense preorder numbering
  CHECK(q.node_count == 6);
  CHECK(q.root->id == 0);
  CHECK(bgp1.id == 1);
  CHECK(opt.id == 2);
  CHECK(opt.children[0]->id == 3);
  CHECK(opt.children[0]->children[0]->id == 4);
  CHECK(bgp2.id == 5);
}

TEST_CASE("select star and result modifiers") {
  const Query q = parse(
      "SELECT * WHERE { GRAPH ?g { ?s ?p ?o . } } LIMIT 10 OFFSET 3");
  CHECK(q.select_all);
  CHECK(q.limit == 10);
  CHECK(q.offset == 3);
  CHECK(!q.distinct);

  const Query d1 = parse("SELECT DISTINCT ?s WHERE { GRAPH ?g { ?s ?p ?o . } }");
  CHECK(d1.distinct);
  const Query d2 = parse("SELECT ?s WHERE { GRAPH ?g { ?s ?p ?o . } } DISTINCT LIMIT 2");
  CHECK(d2.distinct);
  CHECK(d2.limit == 2);
}

TEST_CASE("keywords are case-insensitive, comments are skipped") {
  const Query q = parse(
      "# leading comment\n"
      "select ?s where { graph ?g { # inner comment\n"
      " ?s <http://p> ?o . } } limit 5");
  CHECK(q.select_vars == std::vector<std::string>{"s"});
  CHECK(q.limit == 5);
}

TEST_CASE("union trees and nested groups") {
  ProductionCounts counts;
  const Query q = parse_query(
      "SELECT * WHERE { GRAPH ?g { "
      "{ ?s <http://a> ?o . } UNION { ?s <http://b> ?o . } UNION { ?s <http://c> ?o . } "
      "} }",
      &counts);
  REQUIRE(q.root->children.size() == 1);
  const BgpTreeNode& uni = *q.root->children[0];
  REQUIRE(uni.kind == NodeKind::GroupOrUnionGraphPattern);
  CHECK(uni.children.size() == 3);
  for (const auto& branch : uni.children) CHECK(branch->kind == NodeKind::GroupGraphPattern);
  CHECK(counts["GroupOrUnionGraphPattern"] == 1);
  CHECK(counts["GraphPatternNotTriples"] == 1);

  // A braced group without UNION is still a GroupOrUnion with one branch.
  const Query q2 = parse("SELECT * WHERE { GRAPH ?g { { ?s ?p ?o . } } }");
  REQUIRE(q2.root->children.size() == 1);
  CHECK(q2.root->children[0]->kind == NodeKind::GroupOrUnionGraphPattern);
  CHECK(q2.root->children[0]->children.size() == 1);
}

TEST_CASE("filters: comparisons, regex, bound, EXISTS, NOT EXISTS") {
  ProductionCounts counts;
  const Query q = parse_query(
      "SELECT * WHERE { GRAPH ?g { ?s <http://p> ?v . "
      "FILTER (?v > 5) . "
      "FILTER (?v <= 10.5) . "
      "FILTER regex(?s, \"^http\") . "
      "FILTER bound(?v) . "
      "FILTER EXISTS { ?s <http://q> ?v . } . "
      "FILTER NOT EXISTS { ?s <http://r> ?v . } "
      "} }",
      &counts);
  REQUIRE(q.root->children.size() == 7);
  CHECK(counts["Filter"] == 6);
  CHECK(counts["Constraint.Predicate"] == 4);
  CHECK(counts["Constraint.Exists"] == 1);
  CHECK(counts["Constraint.NotExists"] == 1);

  const BgpTreeNode& gt = *q.root->children[1]->children[0];
  REQUIRE(gt.kind == NodeKind::Predicate);
  CHECK(gt.predicate->op == PredicateExpr::Op::Gt);
  CHECK(as_term(gt.predicate->rhs) ==
        Term::literal("5", "http://www.w3.org/2001/XMLSchema#integer"));

  const BgpTreeNode& le = *q.root->children[2]->children[0];
  CHECK(le.predicate->op == PredicateExpr::Op::Le);
  CHECK(as_term(le.predicate->rhs) ==
        Term::literal("10.5", "http://www.w3.org/2001/XMLSchema#decimal"));

  const BgpTreeNode& re = *q.root->children[3]->children[0];
  CHECK(re.predicate->kind == PredicateExpr::Kind::Regex);
  CHECK(re.predicate->var == "s");
  CHECK(re.predicate->regex_text == "^http");

  const BgpTreeNode& bd = *q.root->children[4]->children[0];
  CHECK(bd.predicate->kind == PredicateExpr::Kind::Bound);

  CHECK(q.root->children[5]->children[0]->kind == NodeKind::Exists);
  CHECK(q.root->children[6]->children[0]->kind == NodeKind::NotExists);
}

TEST_CASE("comparison operators parse without parentheses too") {
  const Query q = parse(
      "SELECT * WHERE { GRAPH ?g { ?s <http://p> ?v . FILTER ?v != \"x\" } }");
  const BgpTreeNode& ne = *q.root->children[1]->children[0];
  CHECK(ne.predicate->op == PredicateExpr::Op::Ne);
  for (const char* op : {"=", "!=", "<", "<=", ">", ">="}) {
    const std::string text = std::string("SELECT * WHERE { GRAPH ?g { ?s <http://p> ?v . FILTER (?v ") +
                             op + " 3) } }";
    CHECK_NOTHROW(parse(text));
  }
}

TEST_CASE("numeric literal forms") {
  const Query q = parse(
      "SELECT * WHERE { GRAPH ?g { "
      "?s <http://p> 42 . ?s <http://p> -7 . ?s <http://p> 3.25 . ?s <http://p> 1e3 . } }");
  const auto& bgp = q.root->children[0]->bgp;
  REQUIRE(bgp.size() == 4);
  CHECK(*as_term(bgp[0].object).datatype == "http://www.w3.org/2001/XMLSchema#integer");
  CHECK(as_term(bgp[1].object).lexical == "-7");
  CHECK(*as_term(bgp[2].object).datatype == "http://www.w3.org/2001/XMLSchema#decimal");
  CHECK(*as_term(bgp[3].object).datatype == "http://www.w3.org/2001/XMLSchema#double");
}

TEST_CASE("typed and tagged literals, datatype via prefixed name") {
  const Query q = parse(
      "PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n"
      "SELECT * WHERE { GRAPH ?g { "
      "?s <http://p> \"hi\"@en . "
      "?s <http://p> \"5\"^^xsd:integer . "
      "?s <http://p> \"raw\"^^<http://dt> . } }");
  const auto& bgp = q.root->children[0]->bgp;
  CHECK(as_term(bgp[0].object) == Term::literal("hi", std::nullopt, "en"));
  CHECK(as_term(bgp[1].object) ==
        Term::literal("5", "http://www.w3.org/2001/XMLSchema#integer"));
  CHECK(as_term(bgp[2].object) == Term::literal("raw", "http://dt"));
}

TEST_CASE("default prefix and duplicate-pattern dedup") {
  const Query q = parse(
      "PREFIX : <http://base/>\n"
      "SELECT * WHERE { GRAPH ?g { ?s :p :o . ?s :p :o . } }");
  REQUIRE(q.root->children.size() == 1);
  CHECK(q.root->children[0]->bgp.size() == 1);  // exact duplicate removed
  CHECK(as_term(q.root->children[0]->bgp[0].predicate) == Term::iri("http://base/p"));
}

TEST_CASE("syntax errors carry a position and expectation") {
  try {
    parse("SELECT ?s WHERE { GRAPH ?g { ?s <http://p> } }");
    FAIL("expected a SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 1);
    CHECK(e.col > 40);
    CHECK(!e.expected.empty());
    CHECK(!e.found.empty());
  }

  CHECK_THROWS_AS(parse(""), SyntaxError);
  CHECK_THROWS_AS(parse("SELECT WHERE { GRAPH ?g { ?s ?p ?o . } }"), SyntaxError);
  CHECK_THROWS_AS(parse("SELECT ?s { GRAPH ?g { ?s ?p ?o . } }"), SyntaxError);          // no WHERE
  CHECK_THROWS_AS(parse("SELECT ?s WHERE { ?s ?p ?o . }"), SyntaxError);                  // no GRAPH
  CHECK_THROWS_AS(parse("SELECT ?s WHERE { GRAPH ?g { ?s ?p ?o . }"), SyntaxError);       // open brace
  CHECK_THROWS_AS(parse("SELECT ?s WHERE { GRAPH ?g { ?s ?p ?o . } } trailing"), SyntaxError);
  CHECK_THROWS_AS(parse("SELECT ?s WHERE { GRAPH ?g { ?s undeclared:x ?o . } }"), SyntaxError);
  CHECK_THROWS_AS(parse("SELECT ?s WHERE { GRAPH ?g { ?s ?p ?o . FILTER frob(?s) } }"),
                  SyntaxError);
  CHECK_THROWS_AS(parse("SELECT ?s WHERE { GRAPH ?g { ?s ?p ?o . } } LIMIT -3"), SyntaxError);
  // multi-line error position
  try {
    parse("SELECT ?s WHERE {\n  GRAPH ?g {\n    ?s ?p @bad . } }");
    FAIL("expected a SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("format/parse round-trips preserve structure") {
  const char* queries[] = {
      kMovieQuery,
      "SELECT * WHERE { GRAPH ?g { ?s ?p ?o . } }",
      "SELECT DISTINCT ?s ?o WHERE { GRAPH ?g { ?s <http://p> ?o . "
      "{ ?s <http://a> ?x . } UNION { ?s <http://b> ?x . } . "
      "OPTIONAL { ?s <http://c> ?y . } . "
      "FILTER (?x > 3) . FILTER NOT EXISTS { ?s <http://d> ?o . } } } LIMIT 7 OFFSET 2",
      "SELECT ?v WHERE { GRAPH ?g { ?s <http://p> ?v . FILTER regex(?v, \"a.c\") . "
      "FILTER bound(?s) } }",
  };
  for (const char* text : queries) {
    const Query q1 = parse(text);
    const std::string formatted = format_query(q1);
    const Query q2 = parse(formatted);
    CHECK_MESSAGE(query_equal(q1, q2), formatted);
    CHECK(format_query(q2) == formatted);  // fixed point after one round
  }
}

TEST_CASE("collect_variables: graph variable first, then appearance order") {
  const Query q = parse(
      "SELECT * WHERE { GRAPH ?ctx { ?a <http://p> ?b . OPTIONAL { ?b <http://q> ?c . } . "
      "FILTER bound(?d) } }");
  CHECK(collect_variables(q) == std::vector<std::string>{"ctx", "a", "b", "c", "d"});
}

TEST_CASE("clone and tree_equal") {
  const Query q = parse(kMovieQuery);
  const Query c = q.clone();
  CHECK(query_equal(q, c));
  CHECK(c.root.get() != q.root.get());

  Query mutated = q.clone();
  mutated.root->children.pop_back();
  CHECK(!query_equal(q, mutated));
}

}  // TEST_SUITE
