#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "riq/fingerprint.hpp"
#include "riq/generator.hpp"
#include "riq/graph_store.hpp"
#include "riq/nquads.hpp"
#include "riq/pv_index.hpp"
#include "riq/query_engine.hpp"
#include "riq/sparql.hpp"

namespace py = pybind11;
using namespace riq;

namespace {

std::vector<Quad> quads_from_text(const std::string& nquads) {
  NQuadsOptions opts;
  opts.strict = true;
  return parse_nquads(nquads, opts).quads;
}

py::dict stats_dict(const IndexStats& stats) {
  py::dict d;
  d["graph_count"] = stats.graph_count;
  d["group_count"] = stats.group_count;
  d["quad_count"] = stats.quad_count;
  d["total_filter_bytes"] = stats.total_filter_bytes;
  py::list groups;
  for (const GroupStats& g : stats.groups) {
    py::dict gd;
    gd["group_id"] = g.group_id;
    gd["member_count"] = g.member_count;
    gd["quad_count"] = g.quad_count;
    gd["filter_bytes"] = g.filter_bytes;
    groups.append(std::move(gd));
  }
  d["groups"] = std::move(groups);
  return d;
}

py::dict table_dict(const BindingTable& table) {
  py::dict d;
  d["columns"] = table.columns;
  py::list rows;
  for (const auto& row : table.rows) {
    py::list cells;
    for (const auto& cell : row) {
      if (cell)
        cells.append(serialize_term(*cell));
      else
        cells.append(py::none());
    }
    rows.append(std::move(cells));
  }
  d["rows"] = std::move(rows);
  return d;
}

Query to_query(const py::object& q) {
  if (py::isinstance<py::str>(q)) return parse_query(q.cast<std::string>());
  return q.cast<const Query&>().clone();
}

}  // namespace

PYBIND11_MODULE(_riq, m) {
  m.doc() = "Pattern-vector index over RDF quad datasets";

  py::register_exception<NQuadsError>(m, "NQuadsError", PyExc_ValueError);
  py::register_exception<SyntaxError>(m, "QuerySyntaxError", PyExc_ValueError);
  py::register_exception<CorruptIndex>(m, "CorruptIndexError", PyExc_RuntimeError);
  py::register_exception<VersionMismatch>(m, "VersionMismatchError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "fingerprint",
      [](const py::bytes& data) {
        return fingerprint::fingerprint(static_cast<std::string_view>(std::string(data)));
      },
      py::arg("data"), "64-bit Rabin fingerprint of a byte string.");
  m.def(
      "fingerprint",
      [](const std::string& data) { return fingerprint::fingerprint(data); }, py::arg("data"));

  py::class_<Query>(m, "Query")
      .def_property_readonly("graph_var", [](const Query& q) { return q.graph_var; })
      .def_property_readonly("select_all", [](const Query& q) { return q.select_all; })
      .def_property_readonly("distinct", [](const Query& q) { return q.distinct; })
      .def_property_readonly("limit", [](const Query& q) { return q.limit; })
      .def_property_readonly("offset", [](const Query& q) { return q.offset; })
      .def_property_readonly("variables", [](const Query& q) { return collect_variables(q); })
      .def("__str__", [](const Query& q) { return format_query(q); })
      .def(
          "__eq__", [](const Query& a, const Query& b) { return query_equal(a, b); },
          py::is_operator());

  m.def("parse_query", [](const std::string& text) { return parse_query(text); },
        py::arg("text"), "Parse a query; raises QuerySyntaxError on bad input.");
  m.def("format_query", &format_query, py::arg("query"));

  m.def(
      "parse_nquads",
      [](const std::string& text, bool strict, std::optional<std::string> default_graph) {
        NQuadsOptions opts;
        opts.strict = strict;
        opts.default_graph = std::move(default_graph);
        const ParsedQuads parsed = parse_nquads(text, opts);
        py::list quads;
        for (const Quad& q : parsed.quads) {
          quads.append(py::make_tuple(serialize_term(q.subject), serialize_term(q.predicate),
                                      serialize_term(q.object), serialize_term(q.context)));
        }
        py::list errors;
        for (const MalformedLine& e : parsed.errors)
          errors.append(py::make_tuple(e.line_no, e.reason));
        return py::make_tuple(std::move(quads), std::move(errors));
      },
      py::arg("text"), py::arg("strict") = false, py::arg("default_graph") = std::nullopt,
      "Parse N-Quads text into ((s, p, o, g) term-string tuples, (line, reason) errors).");

  m.def(
      "generate_dataset",
      [](uint32_t vocabularies, uint32_t graphs_per_vocabulary, uint32_t triples_per_graph,
         double overlap, uint64_t seed) {
        GeneratorConfig cfg;
        cfg.vocabularies = vocabularies;
        cfg.graphs_per_vocabulary = graphs_per_vocabulary;
        cfg.triples_per_graph = triples_per_graph;
        cfg.overlap = overlap;
        cfg.seed = seed;
        const GeneratedDataset ds = generate_dataset(cfg);
        py::dict d;
        d["nquads"] = serialize_nquads(ds.quads);
        py::list vocab_graphs;
        for (const auto& contexts : ds.vocabulary_graphs) {
          py::list names;
          for (const Term& c : contexts) names.append(c.lexical);
          vocab_graphs.append(std::move(names));
        }
        d["vocabulary_graphs"] = std::move(vocab_graphs);
        return d;
      },
      py::arg("vocabularies") = 5, py::arg("graphs_per_vocabulary") = 200,
      py::arg("triples_per_graph") = 50, py::arg("overlap") = 0.0, py::arg("seed") = 1,
      "Synthesize a multi-vocabulary quad dataset; returns its N-Quads text and "
      "the context IRIs of each vocabulary's graphs.");

  py::class_<PvIndex>(m, "Index")
      .def_property_readonly("directory",
                             [](const PvIndex& idx) { return idx.directory().string(); })
      .def_property_readonly("graph_count", [](const PvIndex& idx) { return idx.graph_count(); })
      .def_property_readonly("group_count",
                             [](const PvIndex& idx) { return idx.groups.size(); })
      .def("stats", [](const PvIndex& idx) { return stats_dict(index_stats(idx)); })
      .def(
          "candidate_groups",
          [](const PvIndex& idx, const py::object& query, uint32_t workers) {
            const Query q = to_query(query);
            const CandidateReport r = find_candidates(q, idx, workers);
            py::dict d;
            d["group_ids"] = r.candidate_group_ids;
            d["groups_tested"] = r.stats.groups_tested;
            d["bgp_membership_tests"] = r.stats.bgp_membership_tests;
            d["cells_compared"] = r.stats.cells_compared;
            return d;
          },
          py::arg("query"), py::arg("workers") = 0,
          "Groups that may answer the query (a Query or query text), with filter stats.")
      .def(
          "answer",
          [](const PvIndex& idx, const py::object& query, uint32_t workers) {
            const Query q = to_query(query);
            return table_dict(answer_query(q, idx, workers));
          },
          py::arg("query"), py::arg("workers") = 0,
          "Evaluate a query; returns {'columns': [...], 'rows': [[term-string or None]]}.");

  m.def(
      "build_index",
      [](const std::string& nquads, const std::filesystem::path& directory, double epsilon,
         uint64_t seed, uint32_t lsh_k, uint32_t lsh_l, uint32_t workers, bool keep_pvs) {
        IndexConfig cfg;
        cfg.epsilon = epsilon;
        cfg.seed = seed;
        cfg.lsh_k = lsh_k;
        cfg.lsh_l = lsh_l;
        cfg.workers = workers;
        cfg.keep_pvs = keep_pvs;
        return build_index(group_by_context(quads_from_text(nquads)), cfg, directory);
      },
      py::arg("nquads"), py::arg("directory"), py::arg("epsilon") = 0.05, py::arg("seed") = 0,
      py::arg("lsh_k") = 5, py::arg("lsh_l") = 3, py::arg("workers") = 0,
      py::arg("keep_pvs") = false,
      "Group the graphs of an N-Quads dataset by similarity and write the index "
      "to a directory.");
  m.def("load_index", [](const std::filesystem::path& dir) { return load_index(dir); },
        py::arg("directory"));
}
