// SPDX-License-Identifier: Apache-2.0
#include "lcsx/bundle.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <sstream>

#include "lcsx/error.hpp"

namespace lcsx {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

json to_json(const BuildReport& r) {
  json edges = json::array();
  for (const auto& [child, parent] : r.removed_edges) edges.push_back({child, parent});
  return {{"topics", r.topics},
          {"assigned_topics", r.assigned_topics},
          {"orphans", r.orphans},
          {"ancestors", r.ancestors},
          {"cycles_broken", r.cycles_broken},
          {"removed_edges", edges}};
}

json to_json(const PruneReport& r) {
  return {{"removed_by_threshold", r.removed_by_threshold},
          {"collapsed", r.collapsed},
          {"topics_before", r.topics_before},
          {"topics_after", r.topics_after},
          {"nodes_before", r.nodes_before},
          {"nodes_after", r.nodes_after},
          {"depth_before", r.depth_before},
          {"depth_after", r.depth_after}};
}

json to_json(const TreeStats& s) {
  return {{"unique_topics", s.unique_topics},
          {"tree_nodes", s.tree_nodes},
          {"duplicated_fraction", s.duplicated_fraction},
          {"max_depth", s.max_depth},
          {"depth_counts", s.depth_counts}};
}

IndexBundle IndexBundle::build(std::vector<AuthorityRecord> auths, std::vector<BibRecord> bibs,
                               const PruneParams& params, Bm25Config bm25) {
  auto built = build_graph(auths, bibs);

  IndexBundle b;
  for (auto& a : auths) {
    if (built.graph.find(HeadingKey(a.heading))) b.authorities_.push_back(std::move(a));
  }
  std::sort(b.authorities_.begin(), b.authorities_.end(),
            [](const auto& x, const auto& y) { return x.id < y.id; });

  auto pruned = prune(built.graph, params);
  std::sort(bibs.begin(), bibs.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  b.records_ = std::move(bibs);
  b.graph_ = std::move(pruned.graph);
  b.index_ = Index::build(b.records_, b.graph_, bm25);
  b.prune_ = params;
  b.meta_.report = {{"build", to_json(built.report)}, {"prune", to_json(pruned.report)}};
  return b;
}

json IndexBundle::content_json() const {
  json records = json::array();
  for (const auto& r : records_) records.push_back(to_json(r));
  json auths = json::array();
  for (const auto& a : authorities_) auths.push_back(to_json(a));

  const auto& parts = graph_.parts();
  json topics = json::array();
  for (const auto& t : parts.topics) topics.push_back({t.heading, t.key});

  json postings = json::object();
  for (const auto& [term, list] : index_.all_postings()) {
    json entries = json::array();
    for (const auto& p : list) entries.push_back({p.record, p.tf[0], p.tf[1], p.tf[2], p.tf[3]});
    postings[term] = std::move(entries);
  }
  const auto& cfg = index_.config();
  return {
      {"prune", {{"threshold", prune_.threshold}, {"collapse_chains", prune_.collapse_chains}}},
      {"bm25", {{"k1", cfg.k1}, {"b", cfg.b}, {"field_weights", cfg.field_weights}}},
      {"records", std::move(records)},
      {"authorities", std::move(auths)},
      {"graph",
       {{"topics", std::move(topics)},
        {"parents", parts.parents},
        {"record_topics", parts.record_topics}}},
      {"index", {{"doc_lengths", index_.doc_lengths()}, {"postings", std::move(postings)}}},
  };
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void put_section(std::string& out, const json& j) {
  auto bytes = json::to_cbor(j);
  put_u64(out, bytes.size());
  out.append(bytes.begin(), bytes.end());
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw Error(ErrorKind::Bundle, "bundle is truncated");
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint64_t u(int width) {
    auto b = take(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = width - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }
  json section() {
    auto n = u(8);
    auto b = take(n);
    try {
      return json::from_cbor(b.begin(), b.end());
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Bundle, std::string("corrupt bundle section: ") + e.what());
    }
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string IndexBundle::serialize() const {
  std::string out(kMagic);
  put_u32(out, kFormatVersion);
  put_section(out, content_json());
  json sources = json::array();
  for (const auto& [name, digest] : meta_.sources) sources.push_back({name, digest});
  put_section(out, {{"sources", sources}, {"built_at", meta_.built_at}, {"report", meta_.report}});
  return out;
}

IndexBundle IndexBundle::deserialize(std::string_view bytes) {
  Reader in(bytes);
  if (bytes.size() < kMagic.size() || in.take(kMagic.size()) != kMagic) {
    throw Error(ErrorKind::Bundle, "not an index bundle (bad magic)");
  }
  if (auto version = in.u(4); version != kFormatVersion) {
    throw Error(ErrorKind::Bundle, "unsupported bundle version " + std::to_string(version));
  }
  json content = in.section();
  json meta = in.section();
  if (!in.done()) throw Error(ErrorKind::Bundle, "trailing bytes after bundle");

  IndexBundle b;
  try {
    const auto& pr = content.at("prune");
    b.prune_.threshold = pr.at("threshold").get<std::uint32_t>();
    b.prune_.collapse_chains = pr.at("collapse_chains").get<bool>();
    if (b.prune_.threshold < 1) throw Error(ErrorKind::Bundle, "prune threshold below 1");

    Bm25Config cfg;
    const auto& bm = content.at("bm25");
    cfg.k1 = bm.at("k1").get<double>();
    cfg.b = bm.at("b").get<double>();
    cfg.field_weights = bm.at("field_weights").get<std::array<double, kFieldCount>>();

    for (const auto& r : content.at("records")) b.records_.push_back(bib_from_json(r));
    for (const auto& a : content.at("authorities")) b.authorities_.push_back(auth_from_json(a));

    const auto& g = content.at("graph");
    TopicGraph::Parts parts;
    for (const auto& t : g.at("topics")) {
      parts.topics.push_back({t.at(0).get<std::string>(), t.at(1).get<std::string>()});
    }
    parts.parents = g.at("parents").get<std::vector<std::vector<TopicId>>>();
    parts.record_topics = g.at("record_topics").get<std::vector<std::vector<TopicId>>>();
    for (const auto& r : b.records_) parts.record_ids.push_back(r.id);
    b.graph_ = TopicGraph(std::move(parts));

    const auto& ix = content.at("index");
    auto lengths = ix.at("doc_lengths").get<std::vector<FieldCounts>>();
    std::unordered_map<std::string, std::vector<Posting>> postings;
    for (const auto& [term, entries] : ix.at("postings").items()) {
      auto& list = postings[term];
      for (const auto& e : entries) {
        list.push_back({e.at(0).get<RecordIndex>(),
                        {e.at(1).get<std::uint32_t>(), e.at(2).get<std::uint32_t>(),
                         e.at(3).get<std::uint32_t>(), e.at(4).get<std::uint32_t>()}});
      }
    }
    if (lengths.size() != b.records_.size()) {
      throw Error(ErrorKind::Bundle, "index and record store disagree");
    }
    b.index_ = Index::from_parts(std::move(postings), std::move(lengths), cfg);

    for (const auto& s : meta.at("sources")) {
      b.meta_.sources.emplace_back(s.at(0).get<std::string>(), s.at(1).get<std::string>());
    }
    b.meta_.built_at = meta.at("built_at").get<std::string>();
    b.meta_.report = meta.at("report");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Bundle, std::string("invalid bundle content: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::Bundle, std::string("invalid bundle content: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Bundle) throw;
    throw Error(ErrorKind::Bundle, std::string("invalid bundle content: ") + e.what());
  }
  return b;
}

void IndexBundle::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const auto bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

IndexBundle IndexBundle::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

std::string IndexBundle::content_digest() const {
  auto bytes = json::to_cbor(content_json());
  return sha256_hex(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace lcsx
