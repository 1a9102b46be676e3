#include "riq/pv_index.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "riq/fingerprint.hpp"
#include "riq/nquads.hpp"

namespace riq {

namespace {

using nlohmann::json;

constexpr uint32_t kIndexVersion = 1;

uint32_t effective_workers(uint32_t workers) {
  if (workers != 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(size_t n, uint32_t workers, const std::function<void(size_t)>& body) {
  workers = effective_workers(workers);
  if (workers <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> threads;
  const uint32_t count = std::min<uint32_t>(workers, static_cast<uint32_t>(n));
  threads.reserve(count);
  for (uint32_t t = 0; t < count; ++t) {
    threads.emplace_back([&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= n) break;
        body(i);
      }
    });
  }
  for (auto& t : threads) t.join();
}

std::string hex64(uint64_t v) {
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptIndex("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  return hex64(fingerprint::fingerprint(data));
}

class DisjointSets {
 public:
  explicit DisjointSets(size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  size_t find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<size_t> parent_;
  std::vector<uint8_t> rank_;
};

struct BucketKey {
  uint8_t pattern;
  uint32_t band;
  uint64_t value;

  bool operator==(const BucketKey&) const = default;
};

struct BucketKeyHash {
  size_t operator()(const BucketKey& k) const {
    uint64_t h = k.value;
    h ^= (static_cast<uint64_t>(k.pattern) << 56) ^ (static_cast<uint64_t>(k.band) << 40);
    h ^= h >> 33;
    h *= 0xFF51AFD7ED558CCDULL;
    h ^= h >> 33;
    return static_cast<size_t>(h);
  }
};

}  // namespace

void IndexConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0,1)");
  if (lsh_k == 0 || lsh_l == 0) throw ConfigError("LSH k and l must be >= 1");
}

size_t GroupRecord::filter_bytes() const {
  size_t n = spo_filter.byte_size();
  for (const auto& f : pattern_filters) n += f.byte_size();
  return n;
}

std::vector<PatternVector> compute_pvs(const GraphStore& store, uint32_t workers) {
  std::vector<PatternVector> pvs(store.graph_count());
  parallel_for(store.graph_count(), workers,
               [&](size_t i) { pvs[i] = pv_of_graph(store.triples(static_cast<GraphId>(i))); });
  return pvs;
}

std::vector<std::vector<GraphId>> build_similarity_groups(const std::vector<PatternVector>& pvs,
                                                          const LshParams& params,
                                                          uint32_t workers) {
  const size_t n = pvs.size();
  // Signatures per (graph, pattern); empty vectors sign to the empty signature.
  std::vector<std::array<LshSignature, kPatternCount>> sigs(n);
  parallel_for(n, workers, [&](size_t i) {
    for (size_t r = 0; r < kPatternCount; ++r) {
      sigs[i][r] = lsh_sign(params, pvs[i].vectors[r]);
    }
  });

  DisjointSets dsu(n);
  std::unordered_map<BucketKey, size_t, BucketKeyHash> buckets;
  for (size_t i = 0; i < n; ++i) {
    for (size_t r = 0; r < kPatternCount; ++r) {
      const LshSignature& sig = sigs[i][r];
      for (uint32_t band = 0; band < sig.values.size(); ++band) {
        BucketKey key{static_cast<uint8_t>(r), band, sig.values[band]};
        auto [it, inserted] = buckets.try_emplace(key, i);
        if (!inserted) dsu.unite(it->second, i);
      }
    }
  }

  std::map<size_t, std::vector<GraphId>> components;
  for (size_t i = 0; i < n; ++i) components[dsu.find(i)].push_back(static_cast<GraphId>(i));
  std::vector<std::vector<GraphId>> out;
  out.reserve(components.size());
  for (auto& [root, members] : components) {
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  // Deterministic group order: by smallest member id.
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

GroupRecord build_group_record(const std::vector<GraphId>& component,
                               const std::vector<PatternVector>& pvs, double epsilon,
                               uint64_t filter_seed1, uint64_t filter_seed2, uint32_t group_id) {
  GroupRecord rec;
  rec.group_id = group_id;
  rec.member_graph_ids = component;
  std::sort(rec.member_graph_ids.begin(), rec.member_graph_ids.end());

  PatternVector u;
  for (GraphId id : rec.member_graph_ids) u = pv_union(u, pvs[id]);

  const FingerprintMultiset& spo = u[CanonicalPattern::SPO];
  rec.spo_filter = BloomFilter(
      FilterParams::sized_for(spo.distinct_count(), epsilon, filter_seed1, filter_seed2));
  for (const auto& [fp, mult] : spo.entries()) rec.spo_filter.insert(fp);

  for (size_t r = 1; r < kPatternCount; ++r) {
    const FingerprintMultiset& v = u.vectors[r];
    CountingBloomFilter f(
        FilterParams::sized_for(v.distinct_count(), epsilon, filter_seed1, filter_seed2));
    for (const auto& [fp, mult] : v.entries()) f.insert(fp, mult);
    rec.pattern_filters[r - 1] = std::move(f);
  }
  return rec;
}

namespace {

void write_group_filters(const GroupRecord& rec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  rec.spo_filter.serialize(out);
  for (const auto& f : rec.pattern_filters) f.serialize(out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

GroupRecord read_group_filters(uint32_t group_id, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptIndex("missing filter file " + path.string());
  GroupRecord rec;
  rec.group_id = group_id;
  try {
    rec.spo_filter = BloomFilter::deserialize(in);
    for (auto& f : rec.pattern_filters) f = CountingBloomFilter::deserialize(in);
  } catch (const FilterFormatError& e) {
    throw CorruptIndex(path.string() + ": " + e.what());
  }
  return rec;
}

json manifest_to_json(const IndexManifest& m) {
  json j;
  j["version"] = m.version;
  j["epsilon"] = m.epsilon;
  j["rabin_polynomial_low"] = hex64(m.rabin_polynomial_low);
  j["lsh"] = {{"k", m.lsh.k},
              {"l", m.lsh.l},
              {"m", m.lsh.m},
              {"u", m.lsh.u},
              {"master_seed", m.lsh.master_seed}};
  j["filter_seeds"] = {m.filter_seed1, m.filter_seed2};
  j["graph_count"] = m.graph_count;
  j["group_count"] = m.group_count;
  j["quad_count"] = m.quad_count;
  j["checksums"] = m.checksums;
  return j;
}

IndexManifest manifest_from_json(const json& j) {
  IndexManifest m;
  m.version = j.at("version").get<uint32_t>();
  if (m.version != kIndexVersion)
    throw VersionMismatch("index version " + std::to_string(m.version) + " unsupported");
  m.epsilon = j.at("epsilon").get<double>();
  m.rabin_polynomial_low = std::stoull(j.at("rabin_polynomial_low").get<std::string>(), nullptr, 16);
  if (m.rabin_polynomial_low != fingerprint::kPolynomialLow)
    throw VersionMismatch("index built with a different fingerprint polynomial");
  const json& l = j.at("lsh");
  m.lsh = LshParams::create(l.at("k").get<uint32_t>(), l.at("l").get<uint32_t>(),
                            l.at("master_seed").get<uint64_t>());
  m.lsh.m = l.at("m").get<uint64_t>();
  m.lsh.u = l.at("u").get<uint64_t>();
  m.filter_seed1 = j.at("filter_seeds").at(0).get<uint64_t>();
  m.filter_seed2 = j.at("filter_seeds").at(1).get<uint64_t>();
  m.graph_count = j.at("graph_count").get<uint64_t>();
  m.group_count = j.at("group_count").get<uint64_t>();
  m.quad_count = j.at("quad_count").get<uint64_t>();
  for (const auto& [k, v] : j.at("checksums").items()) m.checksums[k] = v.get<std::string>();
  return m;
}

}  // namespace

PvIndex build_index(const GraphStore& store, const IndexConfig& config,
                    const std::filesystem::path& out_dir) {
  config.validate();

  PvIndex index;
  index.dir_ = out_dir;
  std::filesystem::create_directories(out_dir / "groups");

  IndexManifest& m = index.manifest;
  m.version = kIndexVersion;
  m.epsilon = config.epsilon;
  m.rabin_polynomial_low = fingerprint::kPolynomialLow;
  m.lsh = LshParams::create(config.lsh_k, config.lsh_l, config.seed);
  std::mt19937_64 seed_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  m.filter_seed1 = seed_rng();
  m.filter_seed2 = seed_rng();
  m.graph_count = store.graph_count();
  m.quad_count = store.triple_count();

  const std::vector<PatternVector> pvs = compute_pvs(store, config.workers);

  if (config.keep_pvs) {
    std::filesystem::create_directories(out_dir / "pvs");
    for (size_t i = 0; i < pvs.size(); ++i) {
      std::ofstream out(out_dir / "pvs" / (std::to_string(i) + ".pv"));
      dump_pv(pvs[i], out);
    }
  }

  const auto components = build_similarity_groups(pvs, m.lsh, config.workers);
  m.group_count = components.size();

  index.groups.resize(components.size());
  parallel_for(components.size(), config.workers, [&](size_t i) {
    index.groups[i] = build_group_record(components[i], pvs, m.epsilon, m.filter_seed1,
                                         m.filter_seed2, static_cast<uint32_t>(i));
    for (GraphId id : index.groups[i].member_graph_ids)
      index.groups[i].member_quad_count += store.triples(id).size();

    const std::string stem = std::to_string(i);
    write_group_filters(index.groups[i], out_dir / "groups" / (stem + ".filters"));
    std::ofstream nq(out_dir / "groups" / (stem + ".nq"), std::ios::binary);
    for (GraphId id : index.groups[i].member_graph_ids) {
      for (const Quad& q : store.quads_of(id)) nq << serialize_quad(q) << "\n";
    }
  });

  {
    std::ofstream toc(out_dir / "groups.toc");
    for (const GroupRecord& g : index.groups) {
      toc << g.group_id << "\t" << g.member_quad_count << "\t";
      for (size_t i = 0; i < g.member_graph_ids.size(); ++i) {
        if (i) toc << " ";
        toc << g.member_graph_ids[i];
      }
      toc << "\n";
    }
  }
  {
    std::ofstream gtoc(out_dir / "graphs.toc");
    for (GraphId id = 0; id < store.graph_count(); ++id) {
      index.graph_contexts_.push_back(store.context(id));
      gtoc << id << "\t" << serialize_term(store.context(id)) << "\n";
    }
  }

  for (const GroupRecord& g : index.groups) {
    const std::string stem = "groups/" + std::to_string(g.group_id);
    m.checksums[stem + ".filters"] = file_checksum(out_dir / (stem + ".filters"));
    m.checksums[stem + ".nq"] = file_checksum(out_dir / (stem + ".nq"));
  }
  m.checksums["groups.toc"] = file_checksum(out_dir / "groups.toc");
  m.checksums["graphs.toc"] = file_checksum(out_dir / "graphs.toc");

  std::ofstream mf(out_dir / "manifest.json");
  mf << manifest_to_json(m).dump(2) << "\n";
  if (!mf) throw std::runtime_error("failed writing manifest");
  return index;
}

PvIndex load_index(const std::filesystem::path& dir) {
  PvIndex index;
  index.dir_ = dir;

  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw CorruptIndex("missing manifest.json in " + dir.string());
  json j;
  try {
    mf >> j;
  } catch (const json::parse_error& e) {
    throw CorruptIndex(std::string("manifest.json: ") + e.what());
  }
  index.manifest = manifest_from_json(j);

  for (const auto& [rel, expected] : index.manifest.checksums) {
    const std::string actual = file_checksum(dir / rel);
    if (actual != expected) throw CorruptIndex("checksum mismatch for " + rel);
  }

  // groups.toc drives the group list; filters are loaded alongside.
  std::ifstream toc(dir / "groups.toc");
  if (!toc) throw CorruptIndex("missing groups.toc");
  std::string line;
  while (std::getline(toc, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    uint32_t gid;
    uint64_t quad_count;
    if (!(ls >> gid >> quad_count)) throw CorruptIndex("malformed groups.toc line");
    GroupRecord rec =
        read_group_filters(gid, dir / "groups" / (std::to_string(gid) + ".filters"));
    rec.member_quad_count = quad_count;
    GraphId member;
    while (ls >> member) rec.member_graph_ids.push_back(member);
    index.groups.push_back(std::move(rec));
  }
  if (index.groups.size() != index.manifest.group_count)
    throw CorruptIndex("groups.toc group count disagrees with manifest");

  std::ifstream gtoc(dir / "graphs.toc");
  if (!gtoc) throw CorruptIndex("missing graphs.toc");
  while (std::getline(gtoc, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw CorruptIndex("malformed graphs.toc line");
    try {
      index.graph_contexts_.push_back(parse_term_text(line.substr(tab + 1)));
    } catch (const NQuadsError& e) {
      throw CorruptIndex(std::string("graphs.toc: ") + e.what());
    }
  }
  if (index.graph_contexts_.size() != index.manifest.graph_count)
    throw CorruptIndex("graphs.toc graph count disagrees with manifest");

  for (const GroupRecord& g : index.groups) {
    for (GraphId id : g.member_graph_ids) {
      if (id >= index.graph_contexts_.size()) throw CorruptIndex("member graph id out of range");
    }
  }
  return index;
}

int64_t PvIndex::group_of_graph(GraphId id) const {
  for (const GroupRecord& g : groups) {
    if (std::binary_search(g.member_graph_ids.begin(), g.member_graph_ids.end(), id))
      return g.group_id;
  }
  return -1;
}

GraphStore PvIndex::load_group_quads(uint32_t group_id) const {
  std::ifstream in(dir_ / "groups" / (std::to_string(group_id) + ".nq"));
  if (!in) throw CorruptIndex("missing partition for group " + std::to_string(group_id));
  GraphStore store;
  NQuadsOptions opts;
  opts.strict = true;
  parse_nquads_stream(in, opts, [&](Quad&& q, size_t) { store.add_quad(q); });
  return store;
}

IndexStats index_stats(const PvIndex& index) {
  IndexStats s;
  s.graph_count = index.manifest.graph_count;
  s.group_count = index.manifest.group_count;
  s.quad_count = index.manifest.quad_count;
  for (const GroupRecord& g : index.groups) {
    const size_t bytes = g.filter_bytes();
    s.total_filter_bytes += bytes;
    s.groups.push_back({g.group_id, g.member_graph_ids.size(), g.member_quad_count, bytes});
  }
  return s;
}

}  // namespace riq
