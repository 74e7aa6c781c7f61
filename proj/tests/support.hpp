// SPDX-License-Identifier: Apache-2.0
// Random instance generators and brute-force reference implementations
// shared by the unit tests and the acceptance runner. The references are
// written the slow, obvious way and never call the algorithms they check.
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcsx/bundle.hpp"
#include "lcsx/coordination.hpp"
#include "lcsx/hierarchy.hpp"
#include "lcsx/ingest.hpp"
#include "lcsx/search.hpp"

namespace testsupport {

using lcsx::RecordIndex;
using lcsx::TopicGraph;
using lcsx::TopicId;
using lcsx::TreePath;
using Rng = std::mt19937_64;

inline std::string fixture_path(const std::string& name) {
  return std::string(LCSX_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline nlohmann::json read_json(const std::string& fixture) {
  return nlohmann::json::parse(read_file(fixture_path(fixture)));
}

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
  return buf;
}

// Topics 1..n get keys in id order. Parents are drawn from a hidden random
// topological order, so parent ids are not simply smaller than child ids.
struct DagShape {
  std::size_t max_topics = 50;
  std::size_t max_edges = 100;
  std::size_t max_records = 30;
  std::size_t max_topics_per_record = 3;
  double root_edge = 0.15;  // chance an extra edge points at the root
};

inline TopicGraph::Parts random_dag(Rng& rng, const DagShape& shape = {}) {
  const std::size_t n = uniform(rng, 1, shape.max_topics);
  TopicGraph::Parts parts;
  parts.topics.push_back({std::string(lcsx::kRootHeading), ""});
  for (std::size_t i = 1; i <= n; ++i) {
    parts.topics.push_back({numbered("Topic ", i), numbered("topic ", i)});
  }
  std::vector<TopicId> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);

  parts.parents.assign(n + 1, {});
  const std::size_t edges = uniform(rng, 0, shape.max_edges);
  std::size_t placed = 0;
  for (std::size_t attempt = 0; placed < edges && attempt < edges * 4; ++attempt) {
    const std::size_t ci = uniform(rng, 0, n - 1);
    const TopicId child = order[ci];
    TopicId parent = lcsx::kRootTopic;
    if (ci > 0 && !coin(rng, shape.root_edge)) parent = order[uniform(rng, 0, ci - 1)];
    auto& ps = parts.parents[child];
    if (std::find(ps.begin(), ps.end(), parent) != ps.end()) continue;
    ps.push_back(parent);
    ++placed;
  }

  const std::size_t records = uniform(rng, 0, shape.max_records);
  for (std::size_t r = 0; r < records; ++r) {
    parts.record_ids.push_back(numbered("r", r));
    std::set<TopicId> ts;
    const std::size_t k = uniform(rng, 0, shape.max_topics_per_record);
    for (std::size_t j = 0; j < k; ++j) ts.insert(static_cast<TopicId>(uniform(rng, 1, n)));
    parts.record_topics.emplace_back(ts.begin(), ts.end());
  }
  return parts;
}

// Directed graph with arbitrary (possibly cyclic) parent edges.
inline TopicGraph::Parts random_digraph(Rng& rng, std::size_t max_topics, std::size_t max_edges) {
  const std::size_t n = uniform(rng, 1, max_topics);
  TopicGraph::Parts parts;
  parts.topics.push_back({std::string(lcsx::kRootHeading), ""});
  for (std::size_t i = 1; i <= n; ++i) {
    parts.topics.push_back({numbered("Topic ", i), numbered("topic ", i)});
  }
  parts.parents.assign(n + 1, {});
  const std::size_t edges = uniform(rng, 0, max_edges);
  for (std::size_t e = 0; e < edges; ++e) {
    const auto child = static_cast<TopicId>(uniform(rng, 1, n));
    const auto parent = static_cast<TopicId>(uniform(rng, 0, n));
    parts.parents[child].push_back(parent);
  }
  return parts;
}

// --- brute-force references ------------------------------------------------

// Parent lists as the graph normalizes them: deduplicated, and parentless
// non-root topics hang off the root.
inline std::vector<std::set<TopicId>> effective_parents(const TopicGraph::Parts& parts) {
  std::vector<std::set<TopicId>> out(parts.topics.size());
  for (std::size_t t = 1; t < parts.topics.size(); ++t) {
    out[t].insert(parts.parents[t].begin(), parts.parents[t].end());
    if (out[t].empty()) out[t].insert(lcsx::kRootTopic);
  }
  return out;
}

inline std::vector<std::set<TopicId>> child_sets(const std::vector<std::set<TopicId>>& parents) {
  std::vector<std::set<TopicId>> out(parents.size());
  for (std::size_t t = 0; t < parents.size(); ++t) {
    for (TopicId p : parents[t]) out[p].insert(static_cast<TopicId>(t));
  }
  return out;
}

struct Unfolding {
  std::vector<TreePath> paths;  // every root path, the root itself included
  bool truncated = false;
};

// Walks the tree of all root paths. Stops after `cap` paths.
inline Unfolding unfold(const TopicGraph::Parts& parts, std::size_t cap = 2'000'000) {
  const auto children = child_sets(effective_parents(parts));
  Unfolding u;
  TreePath path{lcsx::kRootTopic};
  std::function<void()> walk = [&] {
    if (u.paths.size() >= cap) {
      u.truncated = true;
      return;
    }
    u.paths.push_back(path);
    for (TopicId c : children[path.back()]) {
      path.push_back(c);
      walk();
      path.pop_back();
    }
  };
  walk();
  return u;
}

inline std::vector<std::uint64_t> copies_by_topic(const Unfolding& u, std::size_t topics) {
  std::vector<std::uint64_t> out(topics, 0);
  for (const auto& p : u.paths) ++out[p.back()];
  return out;
}

inline std::set<TopicId> closure_below(const TopicGraph::Parts& parts, TopicId t) {
  const auto children = child_sets(effective_parents(parts));
  std::set<TopicId> seen{t};
  std::vector<TopicId> stack{t};
  while (!stack.empty()) {
    TopicId x = stack.back();
    stack.pop_back();
    for (TopicId c : children[x]) {
      if (seen.insert(c).second) stack.push_back(c);
    }
  }
  return seen;
}

inline std::vector<RecordIndex> records_under(const TopicGraph::Parts& parts, TopicId t,
                                              bool descendants) {
  std::set<TopicId> targets{t};
  if (descendants) targets = closure_below(parts, t);
  std::vector<RecordIndex> out;
  for (std::size_t r = 0; r < parts.record_topics.size(); ++r) {
    for (TopicId x : parts.record_topics[r]) {
      if (targets.count(x)) {
        out.push_back(static_cast<RecordIndex>(r));
        break;
      }
    }
  }
  return out;
}

inline bool has_cycle(const TopicGraph::Parts& parts) {
  const auto parents = effective_parents(parts);
  for (std::size_t t = 1; t < parts.topics.size(); ++t) {
    // t is on a cycle when t is reachable from one of its own parents
    std::set<TopicId> seen;
    std::vector<TopicId> stack(parents[t].begin(), parents[t].end());
    while (!stack.empty()) {
      TopicId x = stack.back();
      stack.pop_back();
      if (x == t) return true;
      if (!seen.insert(x).second) continue;
      stack.insert(stack.end(), parents[x].begin(), parents[x].end());
    }
  }
  return false;
}

// Best copy by exhaustive listing: most shared topics with the anchor, then
// shorter, then lexicographically smaller.
inline TreePath best_copy(const Unfolding& u, TopicId topic, const TreePath& anchor) {
  std::set<TopicId> a(anchor.begin(), anchor.end());
  if (anchor.empty()) a = {lcsx::kRootTopic};
  const TreePath* best = nullptr;
  std::size_t best_overlap = 0;
  for (const auto& p : u.paths) {
    if (p.back() != topic) continue;
    std::size_t overlap = 0;
    for (TopicId x : p) overlap += a.count(x);
    bool better = best == nullptr || overlap > best_overlap ||
                  (overlap == best_overlap &&
                   (p.size() < best->size() || (p.size() == best->size() && p < *best)));
    if (better) {
      best = &p;
      best_overlap = overlap;
    }
  }
  if (best == nullptr) throw std::logic_error("topic has no copy");
  return *best;
}

struct Recount {
  TopicId topic;
  std::uint32_t support;
};

inline std::vector<Recount> recount_promising(const TopicGraph::Parts& parts,
                                              const std::vector<RecordIndex>& ranked) {
  std::map<TopicId, std::uint32_t> support;
  std::map<TopicId, std::size_t> best_rank;
  for (std::size_t i = 0; i < ranked.size() && i < 100; ++i) {
    for (TopicId t : parts.record_topics[ranked[i]]) {
      ++support[t];
      best_rank.emplace(t, i);
    }
  }
  std::vector<Recount> all;
  for (auto [t, s] : support) all.push_back({t, s});
  std::sort(all.begin(), all.end(), [&](const Recount& x, const Recount& y) {
    if (x.support != y.support) return x.support > y.support;
    if (best_rank[x.topic] != best_rank[y.topic]) return best_rank[x.topic] < best_rank[y.topic];
    return parts.topics[x.topic].key < parts.topics[y.topic].key;
  });
  if (all.size() > 2) all.resize(2);
  return all;
}

// --- naive BM25 -------------------------------------------------------------

inline std::vector<std::string> naive_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct NaiveHit {
  RecordIndex record;
  double score;
};

// Recomputes every statistic per query straight from the record text.
inline std::vector<NaiveHit> naive_rank(const std::vector<lcsx::BibRecord>& records,
                                        const TopicGraph::Parts& parts,
                                        const std::vector<std::string>& query_terms,
                                        std::optional<TopicId> filter, bool descendants) {
  const double weights[4] = {2.0, 1.0, 1.0, 1.5};
  const double k1 = 1.2, b = 0.75;
  const std::size_t n = records.size();
  std::vector<std::array<std::vector<std::string>, 4>> docs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    docs[i][0] = naive_tokens(r.title);
    docs[i][1] = naive_tokens(r.statement.value_or(""));
    docs[i][2] = naive_tokens(r.series.value_or(""));
    for (TopicId t : parts.record_topics[i]) {
      for (auto& w : naive_tokens(parts.topics[t].heading)) docs[i][3].push_back(w);
    }
  }
  double avg[4] = {0, 0, 0, 0};
  for (const auto& d : docs) {
    for (int f = 0; f < 4; ++f) avg[f] += static_cast<double>(d[f].size());
  }
  for (double& a : avg) a = n ? a / static_cast<double>(n) : 0.0;

  std::vector<std::string> terms;
  for (const auto& t : query_terms) {
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
  }
  auto contains = [&](std::size_t i, const std::string& t) {
    for (int f = 0; f < 4; ++f) {
      if (std::count(docs[i][f].begin(), docs[i][f].end(), t)) return true;
    }
    return false;
  };

  std::set<RecordIndex> allowed;
  if (filter) {
    for (RecordIndex r : records_under(parts, *filter, descendants)) allowed.insert(r);
  }
  std::vector<NaiveHit> hits;
  for (std::size_t i = 0; i < n; ++i) {
    if (filter && !allowed.count(static_cast<RecordIndex>(i))) continue;
    bool all = true;
    for (const auto& t : terms) all = all && contains(i, t);
    if (!all) continue;
    double score = 0.0;
    for (const auto& t : terms) {
      std::size_t df = 0;
      for (std::size_t j = 0; j < n; ++j) df += contains(j, t) ? 1 : 0;
      const double idf = std::log(1.0 + (static_cast<double>(n) - static_cast<double>(df) + 0.5) /
                                            (static_cast<double>(df) + 0.5));
      for (int f = 0; f < 4; ++f) {
        const double tf = static_cast<double>(std::count(docs[i][f].begin(), docs[i][f].end(), t));
        if (tf == 0) continue;
        const double len = static_cast<double>(docs[i][f].size());
        score += weights[f] * idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avg[f]));
      }
    }
    hits.push_back({static_cast<RecordIndex>(i), score});
  }
  if (!terms.empty()) {
    std::stable_sort(hits.begin(), hits.end(),
                     [](const NaiveHit& x, const NaiveHit& y) { return x.score > y.score; });
  }
  return hits;
}

// Records for a random corpus over an existing topic table: short titles and
// optional fields drawn from a small vocabulary so terms repeat.
inline std::vector<lcsx::BibRecord> random_records(Rng& rng, std::size_t count,
                                                   const std::vector<std::string>& vocab) {
  auto phrase = [&](std::size_t lo, std::size_t hi) {
    std::string s;
    const std::size_t k = uniform(rng, lo, hi);
    for (std::size_t i = 0; i < k; ++i) {
      if (!s.empty()) s += coin(rng, 0.2) ? " -- " : " ";
      s += vocab[uniform(rng, 0, vocab.size() - 1)];
    }
    return s;
  };
  std::vector<lcsx::BibRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    lcsx::BibRecord r;
    r.id = numbered("r", i);
    r.title = phrase(1, 7);
    if (coin(rng, 0.5)) r.statement = phrase(1, 4);
    if (coin(rng, 0.3)) r.series = phrase(1, 3);
    if (coin(rng, 0.7)) r.year = static_cast<int>(uniform(rng, 1900, 2020));
    out.push_back(std::move(r));
  }
  return out;
}

inline const std::vector<std::string>& small_vocab() {
  static const std::vector<std::string> v = {"finite", "element", "method", "boundary", "analysis",
                                             "numerical", "plates", "Shells", "fluid", "flow",
                                             "ELASTIC", "theory", "data", "x"};
  return v;
}

}  // namespace testsupport
