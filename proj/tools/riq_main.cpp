#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "riq/generator.hpp"
#include "riq/graph_store.hpp"
#include "riq/nquads.hpp"
#include "riq/pv_index.hpp"
#include "riq/query_engine.hpp"

namespace {

using nlohmann::json;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void emit_stats(const json& j) { std::cerr << j.dump() << "\n"; }

uint64_t env_u64(const char* name, uint64_t fallback) {
  const char* v = std::getenv(name);
  return v ? std::strtoull(v, nullptr, 10) : fallback;
}

struct CommonArgs {
  uint64_t seed = env_u64("RIQ_SEED", 0);
  uint32_t workers = static_cast<uint32_t>(env_u64("RIQ_WORKERS", 0));
};

int cmd_index(const std::string& input, const std::string& out_dir, riq::IndexConfig config,
              bool strict, const std::string& default_graph) {
  const auto start = std::chrono::steady_clock::now();
  std::ifstream in(input, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open input file: " << input << "\n";
    return 1;
  }
  riq::NQuadsOptions opts;
  opts.strict = strict;
  if (!default_graph.empty()) opts.default_graph = default_graph;

  riq::GraphStore store;
  std::vector<riq::MalformedLine> errors;
  try {
    riq::parse_nquads_stream(in, opts, [&](riq::Quad&& q, size_t) { store.add_quad(q); }, &errors);
  } catch (const riq::NQuadsError& e) {
    std::cerr << "error: " << input << ": " << e.what() << "\n";
    return 1;
  }
  for (const auto& e : errors)
    std::cerr << "warning: " << input << ":" << e.line_no << ": skipped: " << e.reason << "\n";

  riq::PvIndex index;
  try {
    index = riq::build_index(store, config, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const riq::IndexStats stats = riq::index_stats(index);
  emit_stats(json{{"event", "index_summary"},
                  {"graphs", stats.graph_count},
                  {"groups", stats.group_count},
                  {"quads", stats.quad_count},
                  {"filter_bytes", stats.total_filter_bytes},
                  {"malformed_lines", errors.size()},
                  {"wall_seconds", seconds_since(start)}});
  std::cout << "indexed " << stats.graph_count << " graphs into " << stats.group_count
            << " groups (" << stats.quad_count << " quads, " << stats.total_filter_bytes
            << " filter bytes, " << seconds_since(start) << "s)\n";
  return 0;
}

int cmd_query(const std::string& index_dir, const std::string& query_file,
              const std::string& format, bool candidates_only, uint32_t workers) {
  const auto start = std::chrono::steady_clock::now();
  std::ifstream qf(query_file);
  if (!qf) {
    std::cerr << "error: cannot open query file: " << query_file << "\n";
    return 1;
  }
  std::string text((std::istreambuf_iterator<char>(qf)), std::istreambuf_iterator<char>());

  riq::Query query;
  try {
    query = riq::parse_query(text);
  } catch (const riq::SyntaxError& e) {
    std::cerr << "error: " << query_file << ":" << e.line << ":" << e.col << ": expected "
              << e.expected << ", found " << e.found << "\n";
    // caret diagnostic
    std::istringstream lines(text);
    std::string line;
    for (size_t i = 1; std::getline(lines, line) && i <= e.line; ++i) {
      if (i == e.line) {
        std::cerr << "  " << line << "\n  " << std::string(e.col > 0 ? e.col - 1 : 0, ' ')
                  << "^\n";
      }
    }
    return 2;
  }

  riq::PvIndex index;
  try {
    index = riq::load_index(index_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (candidates_only) {
    riq::CandidateReport report = riq::find_candidates(query, index, workers);
    json out;
    out["candidate_group_ids"] = report.candidate_group_ids;
    out["stats"] = {{"groups_tested", report.stats.groups_tested},
                    {"bgp_membership_tests", report.stats.bgp_membership_tests},
                    {"cells_compared", report.stats.cells_compared}};
    json pruned = json::object();
    for (size_t i = 0; i < report.candidate_group_ids.size(); ++i) {
      pruned[std::to_string(report.candidate_group_ids[i])] =
          riq::format_query(report.pruned_queries[i]);
    }
    out["pruned_queries"] = std::move(pruned);
    std::cout << out.dump(2) << "\n";
    emit_stats(json{{"event", "query_summary"},
                    {"candidates", report.candidate_group_ids.size()},
                    {"groups_tested", report.stats.groups_tested},
                    {"wall_seconds", seconds_since(start)}});
    return 0;
  }

  riq::FilterStats stats;
  riq::BindingTable table;
  try {
    table = riq::answer_query(query, index, workers, &stats);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (format == "json") {
    std::cout << riq::format_json_rows(table) << "\n";
  } else {
    std::cout << riq::format_tsv(table);
  }
  emit_stats(json{{"event", "query_summary"},
                  {"rows", table.rows.size()},
                  {"groups_tested", stats.groups_tested},
                  {"bgp_membership_tests", stats.bgp_membership_tests},
                  {"cells_compared", stats.cells_compared},
                  {"wall_seconds", seconds_since(start)}});
  return 0;
}

int cmd_stats(const std::string& index_dir) {
  riq::PvIndex index;
  try {
    index = riq::load_index(index_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const riq::IndexStats s = riq::index_stats(index);
  json out{{"graphs", s.graph_count},
           {"groups", s.group_count},
           {"quads", s.quad_count},
           {"filter_bytes", s.total_filter_bytes},
           {"epsilon", index.manifest.epsilon}};
  json groups = json::array();
  for (const auto& g : s.groups) {
    groups.push_back({{"group_id", g.group_id},
                      {"members", g.member_count},
                      {"quads", g.quad_count},
                      {"filter_bytes", g.filter_bytes}});
  }
  out["per_group"] = std::move(groups);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_gen(const std::string& out_file, const riq::GeneratorConfig& config) {
  riq::GeneratedDataset ds = riq::generate_dataset(config);
  std::ofstream out(out_file, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << out_file << "\n";
    return 1;
  }
  riq::serialize_nquads(ds.quads, out);
  std::ofstream truth(out_file + ".truth.json");
  truth << riq::ground_truth_json(ds) << "\n";
  emit_stats(json{{"event", "gen_summary"},
                  {"quads", ds.quads.size()},
                  {"vocabularies", config.vocabularies},
                  {"graphs", config.vocabularies * config.graphs_per_vocabulary}});
  std::cout << "wrote " << ds.quads.size() << " quads to " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIQ: group-based quad indexing and SPARQL-subset querying"};
  app.require_subcommand(1);
  CommonArgs common;

  // index
  auto* index_cmd = app.add_subcommand("index", "Build a similarity-grouped index from an N-Quads file");
  std::string input, out_dir, default_graph;
  riq::IndexConfig config;
  bool strict = false, keep_pvs = false;
  index_cmd->add_option("-i,--input", input, "N-Quads input file")->required();
  index_cmd->add_option("-o,--output", out_dir, "Index output directory")->required();
  index_cmd->add_option("--epsilon", config.epsilon, "Filter false-positive rate (0,1)");
  index_cmd->add_option("--lsh-k", config.lsh_k, "LSH band count");
  index_cmd->add_option("--lsh-l", config.lsh_l, "LSH rows per band");
  index_cmd->add_option("--seed", common.seed, "Master seed");
  index_cmd->add_option("--workers", common.workers, "Worker threads (0 = all cores)");
  index_cmd->add_flag("--strict-parse", strict, "Abort on malformed N-Quads lines");
  index_cmd->add_flag("--keep-pvs", keep_pvs, "Retain per-graph pattern vector dumps");
  index_cmd->add_option("--default-graph", default_graph,
                        "Context IRI assigned to triple-only lines");

  // query
  auto* query_cmd = app.add_subcommand("query", "Run a query against an index");
  std::string index_dir, query_file, format = "tsv";
  bool candidates_only = false;
  query_cmd->add_option("-x,--index", index_dir, "Index directory")->required();
  query_cmd->add_option("-q,--query", query_file, "Query file (.rq)")->required();
  query_cmd->add_option("--format", format, "Output format: tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));
  query_cmd->add_flag("--candidates-only", candidates_only,
                      "Report candidate groups without executing");
  query_cmd->add_option("--workers", common.workers, "Worker threads (0 = all cores)");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Report index statistics");
  std::string stats_dir;
  stats_cmd->add_option("-x,--index", stats_dir, "Index directory")->required();

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset with ground truth");
  std::string gen_out;
  riq::GeneratorConfig gen_config;
  gen_cmd->add_option("-o,--output", gen_out, "Output N-Quads file")->required();
  gen_cmd->add_option("--vocabularies", gen_config.vocabularies, "Vocabulary count");
  gen_cmd->add_option("--graphs", gen_config.graphs_per_vocabulary, "Graphs per vocabulary");
  gen_cmd->add_option("--triples", gen_config.triples_per_graph, "Triples per graph");
  gen_cmd->add_option("--overlap", gen_config.overlap, "Shared-vocabulary fraction [0,1]");
  gen_cmd->add_option("--seed", gen_config.seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  config.seed = common.seed;
  config.workers = common.workers;
  config.keep_pvs = keep_pvs;

  if (index_cmd->parsed()) return cmd_index(input, out_dir, config, strict, default_graph);
  if (query_cmd->parsed()) return cmd_query(index_dir, query_file, format, candidates_only,
                                            common.workers);
  if (stats_cmd->parsed()) return cmd_stats(stats_dir);
  if (gen_cmd->parsed()) return cmd_gen(gen_out, gen_config);
  return 1;
}
