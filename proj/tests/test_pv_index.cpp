#include <unistd.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "riq/generator.hpp"
#include "riq/graph_store.hpp"
#include "riq/pv_index.hpp"
#include "test_util.hpp"

namespace {

using namespace riq;
namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("riq_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

GraphStore small_store(uint32_t vocabularies, uint32_t graphs, uint32_t triples, uint64_t seed) {
  GeneratorConfig cfg;
  cfg.vocabularies = vocabularies;
  cfg.graphs_per_vocabulary = graphs;
  cfg.triples_per_graph = triples;
  cfg.seed = seed;
  return group_by_context(generate_dataset(cfg).quads);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Reference grouping: explicit pairwise collision edges plus BFS connectivity.
std::vector<std::vector<GraphId>> brute_force_groups(const std::vector<PatternVector>& pvs,
                                                     const LshParams& params) {
  const size_t n = pvs.size();
  std::vector<std::array<LshSignature, kPatternCount>> sigs(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t r = 0; r < kPatternCount; ++r) sigs[i][r] = lsh_sign(params, pvs[i].vectors[r]);
  }
  std::vector<std::vector<size_t>> adj(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      bool edge = false;
      for (size_t r = 0; r < kPatternCount && !edge; ++r) {
        edge = bands_collide(sigs[i][r], sigs[j][r]);
      }
      if (edge) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  std::vector<int> comp(n, -1);
  std::vector<std::vector<GraphId>> out;
  for (size_t i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<size_t> queue{i};
    comp[i] = static_cast<int>(out.size());
    std::vector<GraphId> members;
    while (!queue.empty()) {
      const size_t v = queue.back();
      queue.pop_back();
      members.push_back(static_cast<GraphId>(v));
      for (size_t w : adj[v]) {
        if (comp[w] < 0) {
          comp[w] = comp[i];
          queue.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace

TEST_SUITE("pv_index") {

TEST_CASE("config validation") {
  IndexConfig bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.epsilon = 0.05;
  bad.lsh_k = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  IndexConfig good;
  CHECK_NOTHROW(good.validate());
}

TEST_CASE("bucket grouping equals pairwise-edge connectivity") {
  std::mt19937_64 rng(41);
  for (int iter = 0; iter < 10; ++iter) {
    std::vector<PatternVector> pvs;
    const size_t n = rng() % 60 + 10;
    // Mix of shared pools so some graphs collide and some do not.
    for (size_t i = 0; i < n; ++i) {
      const uint32_t pool = 10 + static_cast<uint32_t>(rng() % 3) * 40;
      pvs.push_back(pv_of_graph(riqtest::rand_graph(rng, rng() % 15 + 2, pool)));
    }
    const LshParams params = LshParams::create(5, 3, rng());
    CHECK(build_similarity_groups(pvs, params, 1) == brute_force_groups(pvs, params));
  }
}

TEST_CASE("groups are ordered by smallest member and partition the graphs") {
  std::mt19937_64 rng(43);
  std::vector<PatternVector> pvs;
  for (int i = 0; i < 50; ++i) {
    pvs.push_back(pv_of_graph(riqtest::rand_graph(rng, 10, 30)));
  }
  const auto groups = build_similarity_groups(pvs, LshParams::create(5, 3, 9));
  std::set<GraphId> seen;
  GraphId last_front = 0;
  for (size_t i = 0; i < groups.size(); ++i) {
    REQUIRE(!groups[i].empty());
    CHECK(std::is_sorted(groups[i].begin(), groups[i].end()));
    if (i > 0) CHECK(groups[i].front() > last_front);
    last_front = groups[i].front();
    for (GraphId id : groups[i]) CHECK(seen.insert(id).second);
  }
  CHECK(seen.size() == pvs.size());
}

TEST_CASE("group records hold every member's fingerprints") {
  std::mt19937_64 rng(47);
  std::vector<PatternVector> pvs;
  std::vector<std::set<Triple>> graphs;
  for (int i = 0; i < 8; ++i) {
    graphs.push_back(riqtest::rand_graph(rng, 12, 20));
    pvs.push_back(pv_of_graph(graphs.back()));
  }
  std::vector<GraphId> component{0, 2, 5, 7};
  const GroupRecord rec = build_group_record(component, pvs, 0.05, 11, 22, 3);
  CHECK(rec.group_id == 3);
  CHECK(rec.member_graph_ids == component);

  PatternVector u;
  for (GraphId id : component) u = pv_union(u, pvs[id]);
  CHECK(rec.spo_filter.params().capacity == u[CanonicalPattern::SPO].distinct_count());
  for (const auto& [fp, mult] : u[CanonicalPattern::SPO].entries()) {
    CHECK(rec.spo_filter.query(fp));
  }
  for (size_t r = 1; r < kPatternCount; ++r) {
    const auto& filt = rec.pattern_filters[r - 1];
    CHECK(filt.params().capacity == u.vectors[r].distinct_count());
    for (const auto& [fp, mult] : u.vectors[r].entries()) {
      CHECK(filt.count(fp) >= mult);
    }
  }
  CHECK(rec.filter_bytes() > 0);
}

TEST_CASE("build, load, and stats round-trip") {
  TempDir dir("roundtrip");
  const GraphStore store = small_store(3, 8, 15, 5);
  IndexConfig cfg;
  cfg.seed = 99;
  const PvIndex built = build_index(store, cfg, dir.path);
  CHECK(built.manifest.graph_count == store.graph_count());
  CHECK(built.manifest.quad_count == store.triple_count());
  CHECK(built.manifest.group_count == built.groups.size());

  const PvIndex loaded = load_index(dir.path);
  CHECK(loaded.manifest.epsilon == built.manifest.epsilon);
  CHECK(loaded.manifest.lsh == built.manifest.lsh);
  CHECK(loaded.manifest.checksums == built.manifest.checksums);
  REQUIRE(loaded.groups.size() == built.groups.size());
  for (size_t i = 0; i < built.groups.size(); ++i) {
    CHECK(loaded.groups[i].group_id == built.groups[i].group_id);
    CHECK(loaded.groups[i].member_graph_ids == built.groups[i].member_graph_ids);
    CHECK(loaded.groups[i].spo_filter == built.groups[i].spo_filter);
    for (size_t r = 0; r + 1 < kPatternCount; ++r) {
      CHECK(loaded.groups[i].pattern_filters[r] == built.groups[i].pattern_filters[r]);
    }
    CHECK(loaded.groups[i].member_quad_count == built.groups[i].member_quad_count);
  }
  CHECK(loaded.graph_count() == store.graph_count());
  for (GraphId g = 0; g < store.graph_count(); ++g) {
    CHECK(loaded.graph_context(g) == store.context(g));
    CHECK(loaded.group_of_graph(g) == built.group_of_graph(g));
    CHECK(loaded.group_of_graph(g) >= 0);
  }

  const IndexStats stats = index_stats(loaded);
  CHECK(stats.graph_count == store.graph_count());
  uint64_t quads = 0;
  size_t members = 0;
  for (const GroupStats& g : stats.groups) {
    quads += g.quad_count;
    members += g.member_count;
    CHECK(g.filter_bytes > 0);
  }
  CHECK(quads == store.triple_count());
  CHECK(members == store.graph_count());

  // group partitions reload into the same triples
  for (const GroupRecord& g : loaded.groups) {
    const GraphStore part = loaded.load_group_quads(g.group_id);
    CHECK(part.graph_count() == g.member_graph_ids.size());
    for (GraphId id : g.member_graph_ids) {
      const int64_t local = part.graph_id(store.context(id));
      REQUIRE(local >= 0);
      CHECK(part.triples(static_cast<GraphId>(local)) == store.triples(id));
    }
  }
}

TEST_CASE("rebuilds are byte-identical") {
  TempDir d1("det1"), d2("det2");
  const GraphStore store = small_store(2, 6, 12, 8);
  IndexConfig cfg;
  cfg.seed = 1234;
  cfg.workers = 4;  // parallelism must not affect the output
  build_index(store, cfg, d1.path);
  cfg.workers = 1;
  build_index(store, cfg, d2.path);
  for (const char* rel : {"manifest.json", "groups.toc", "graphs.toc"}) {
    CHECK(slurp(d1.path / rel) == slurp(d2.path / rel));
  }
  const PvIndex idx = load_index(d1.path);
  for (const auto& [rel, sum] : idx.manifest.checksums) {
    CHECK(slurp(d1.path / rel) == slurp(d2.path / rel));
  }
}

TEST_CASE("different seeds produce different filter parameters") {
  TempDir d1("seed1"), d2("seed2");
  const GraphStore store = small_store(2, 4, 10, 3);
  IndexConfig cfg;
  cfg.seed = 1;
  const PvIndex a = build_index(store, cfg, d1.path);
  cfg.seed = 2;
  const PvIndex b = build_index(store, cfg, d2.path);
  CHECK(a.manifest.filter_seed1 != b.manifest.filter_seed1);
  CHECK(a.manifest.lsh.seeds != b.manifest.lsh.seeds);
}

TEST_CASE("keep_pvs writes one dump per graph") {
  TempDir dir("pvs");
  const GraphStore store = small_store(1, 5, 8, 7);
  IndexConfig cfg;
  cfg.keep_pvs = true;
  build_index(store, cfg, dir.path);
  for (size_t i = 0; i < store.graph_count(); ++i) {
    CHECK(fs::exists(dir.path / "pvs" / (std::to_string(i) + ".pv")));
  }
}

TEST_CASE("similar graphs group together, disjoint vocabularies stay apart") {
  TempDir dir("vocab");
  const GraphStore store = small_store(4, 12, 25, 21);
  IndexConfig cfg;
  cfg.seed = 77;
  const PvIndex idx = build_index(store, cfg, dir.path);
  // Within a vocabulary the ?P? vectors share the whole predicate pool, so
  // all of a vocabulary's graphs must land in one group.
  CHECK(idx.groups.size() == 4);
}

TEST_CASE("corruption and version problems are detected") {
  TempDir dir("corrupt");
  const GraphStore store = small_store(2, 4, 10, 13);
  build_index(store, IndexConfig{}, dir.path);
  REQUIRE_NOTHROW(load_index(dir.path));

  SUBCASE("flipped byte in a filter file") {
    const fs::path target = dir.path / "groups" / "0.filters";
    std::string data = slurp(target);
    data[data.size() / 2] = static_cast<char>(data[data.size() / 2] ^ 0x40);
    std::ofstream(target, std::ios::binary) << data;
    CHECK_THROWS_AS(load_index(dir.path), CorruptIndex);
  }
  SUBCASE("truncated partition") {
    const fs::path target = dir.path / "groups" / "0.nq";
    const std::string data = slurp(target);
    std::ofstream(target, std::ios::binary) << data.substr(0, data.size() / 2);
    CHECK_THROWS_AS(load_index(dir.path), CorruptIndex);
  }
  SUBCASE("missing manifest") {
    fs::remove(dir.path / "manifest.json");
    CHECK_THROWS_AS(load_index(dir.path), CorruptIndex);
  }
  SUBCASE("manifest is not json") {
    std::ofstream(dir.path / "manifest.json") << "not json";
    CHECK_THROWS_AS(load_index(dir.path), CorruptIndex);
  }
  SUBCASE("unsupported version") {
    std::string data = slurp(dir.path / "manifest.json");
    const auto at = data.find("\"version\": 1");
    REQUIRE(at != std::string::npos);
    data.replace(at, 12, "\"version\": 9");
    std::ofstream(dir.path / "manifest.json") << data;
    CHECK_THROWS_AS(load_index(dir.path), VersionMismatch);
  }
}

}  // TEST_SUITE
