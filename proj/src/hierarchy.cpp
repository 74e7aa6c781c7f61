// SPDX-License-Identifier: Apache-2.0
#include "lcsx/hierarchy.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "lcsx/error.hpp"

namespace lcsx {

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b
             ? std::numeric_limits<std::uint64_t>::max()
             : a + b;
}

void sort_unique(std::vector<TopicId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

TopicGraph::Parts root_only_parts() {
  TopicGraph::Parts p;
  p.topics.push_back({std::string(kRootHeading), ""});
  p.parents.emplace_back();
  return p;
}

}  // namespace

TopicGraph::TopicGraph() : TopicGraph(root_only_parts()) {}

TopicGraph::TopicGraph(Parts parts) : parts_(std::move(parts)) { derive(); }

void TopicGraph::derive() {
  const std::size_t n = parts_.topics.size();
  if (n == 0) throw std::invalid_argument("topic graph needs a root");
  if (parts_.parents.size() != n) throw std::invalid_argument("parents/topics size mismatch");
  if (parts_.record_topics.size() != parts_.record_ids.size()) {
    throw std::invalid_argument("record_topics/record_ids size mismatch");
  }
  for (std::size_t r = 1; r < parts_.record_ids.size(); ++r) {
    if (!(parts_.record_ids[r - 1] < parts_.record_ids[r])) {
      throw std::invalid_argument("record ids must be strictly ascending");
    }
  }
  if (!parts_.parents[kRootTopic].empty()) throw std::invalid_argument("root cannot have parents");

  by_key_.clear();
  for (TopicId t = 1; t < n; ++t) {
    auto& ps = parts_.parents[t];
    for (TopicId p : ps) {
      if (p >= n) throw std::invalid_argument("parent id out of range");
    }
    sort_unique(ps);
    if (ps.empty()) ps.push_back(kRootTopic);
    by_key_.emplace(parts_.topics[t].key, t);
  }

  direct_count_.assign(n, 0);
  topic_records_.assign(n, {});
  for (RecordIndex r = 0; r < parts_.record_topics.size(); ++r) {
    auto& ts = parts_.record_topics[r];
    std::vector<TopicId> kept;
    for (TopicId t : ts) {
      if (t >= n) throw std::invalid_argument("record topic out of range");
      if (std::find(kept.begin(), kept.end(), t) == kept.end()) kept.push_back(t);
    }
    ts = std::move(kept);
    for (TopicId t : ts) {
      ++direct_count_[t];
      topic_records_[t].push_back(r);
    }
  }

  // Each record counts once toward every topic on or above its assignments.
  // The stamped walk terminates on cyclic graphs too.
  subtree_count_.assign(n, 0);
  std::vector<RecordIndex> stamp(n, std::numeric_limits<RecordIndex>::max());
  std::vector<TopicId> stack;
  for (RecordIndex r = 0; r < parts_.record_topics.size(); ++r) {
    for (TopicId t : parts_.record_topics[r]) {
      if (stamp[t] == r) continue;
      stamp[t] = r;
      stack.push_back(t);
    }
    while (!stack.empty()) {
      TopicId t = stack.back();
      stack.pop_back();
      ++subtree_count_[t];
      for (TopicId p : parts_.parents[t]) {
        if (stamp[p] != r) {
          stamp[p] = r;
          stack.push_back(p);
        }
      }
    }
  }

  children_.assign(n, {});
  for (TopicId t = 1; t < n; ++t) {
    for (TopicId p : parts_.parents[t]) children_[p].push_back(t);
  }
  for (auto& cs : children_) {
    std::sort(cs.begin(), cs.end(), [this](TopicId a, TopicId b) {
      if (subtree_count_[a] != subtree_count_[b]) return subtree_count_[a] > subtree_count_[b];
      const auto& ka = parts_.topics[a].key;
      const auto& kb = parts_.topics[b].key;
      if (ka != kb) return ka < kb;
      return a < b;
    });
  }

  // Kahn's algorithm over parent -> child edges.
  topo_.clear();
  std::vector<std::size_t> pending(n);
  for (TopicId t = 0; t < n; ++t) pending[t] = parts_.parents[t].size();
  std::vector<TopicId> ready;
  for (TopicId t = 0; t < n; ++t) {
    if (pending[t] == 0) ready.push_back(t);
  }
  while (!ready.empty()) {
    TopicId t = ready.back();
    ready.pop_back();
    topo_.push_back(t);
    for (TopicId c : children_[t]) {
      if (--pending[c] == 0) ready.push_back(c);
    }
  }
  acyclic_ = topo_.size() == n;
  occurrences_.clear();
  if (!acyclic_) {
    topo_.clear();
    return;
  }
  occurrences_.assign(n, 0);
  for (TopicId t : topo_) {
    if (t == kRootTopic) {
      occurrences_[t] = 1;
      continue;
    }
    std::uint64_t sum = 0;
    for (TopicId p : parts_.parents[t]) sum = sat_add(sum, occurrences_[p]);
    occurrences_[t] = sum;
  }
}

std::optional<TopicId> TopicGraph::find(const HeadingKey& key) const {
  auto it = by_key_.find(key.str());
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::optional<RecordIndex> TopicGraph::find_record(std::string_view id) const {
  const auto& ids = parts_.record_ids;
  auto it = std::lower_bound(ids.begin(), ids.end(), id,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == ids.end() || *it != id) return std::nullopt;
  return static_cast<RecordIndex>(it - ids.begin());
}

std::uint64_t TopicGraph::occurrences(TopicId t) const {
  if (!acyclic_) throw std::logic_error("occurrence counts need an acyclic graph");
  return occurrences_.at(t);
}

CycleBreakResult break_cycles(const TopicGraph& graph) {
  const auto& in = graph.parts();
  const std::size_t n = in.topics.size();

  std::vector<TopicId> order(n);
  std::iota(order.begin(), order.end(), TopicId{0});
  std::sort(order.begin(), order.end(), [&](TopicId a, TopicId b) {
    if (in.topics[a].key != in.topics[b].key) return in.topics[a].key < in.topics[b].key;
    return a < b;
  });

  enum : std::uint8_t { kUnseen, kOnStack, kDone };
  std::vector<std::uint8_t> state(n, kUnseen);
  std::vector<std::vector<bool>> dropped(n);
  for (TopicId t = 0; t < n; ++t) dropped[t].assign(in.parents[t].size(), false);

  CycleBreakResult out;
  struct Frame {
    TopicId topic;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (TopicId start : order) {
    if (state[start] != kUnseen) continue;
    state[start] = kOnStack;
    stack.push_back({start, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& ps = in.parents[f.topic];
      if (f.next == ps.size()) {
        state[f.topic] = kDone;
        stack.pop_back();
        continue;
      }
      const std::size_t i = f.next++;
      const TopicId p = ps[i];
      if (state[p] == kOnStack) {
        dropped[f.topic][i] = true;
        out.removed.push_back({f.topic, p});
      } else if (state[p] == kUnseen) {
        state[p] = kOnStack;
        stack.push_back({p, 0});
      }
    }
  }

  TopicGraph::Parts parts = in;
  for (TopicId t = 0; t < n; ++t) {
    std::vector<TopicId> kept;
    for (std::size_t i = 0; i < in.parents[t].size(); ++i) {
      if (!dropped[t][i]) kept.push_back(in.parents[t][i]);
    }
    parts.parents[t] = std::move(kept);
  }
  out.graph = TopicGraph(std::move(parts));
  return out;
}

BuildResult build_graph(std::span<const AuthorityRecord> auths, std::span<const BibRecord> bibs) {
  // Bibliographic records in id order.
  std::vector<const BibRecord*> records;
  records.reserve(bibs.size());
  for (const auto& b : bibs) records.push_back(&b);
  std::sort(records.begin(), records.end(),
            [](const BibRecord* a, const BibRecord* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i - 1]->id == records[i]->id) {
      throw Error(ErrorKind::DuplicateId, "duplicate record id '" + records[i]->id + "'");
    }
  }

  // Authority entries merged by heading key, in (key, id) order.
  struct AuthEntry {
    std::string heading;
    std::vector<std::string> broader_keys;
    std::vector<std::string> broader_display;
  };
  std::vector<std::pair<std::string, const AuthorityRecord*>> sorted_auths;
  for (const auto& a : auths) sorted_auths.emplace_back(HeadingKey(a.heading).str(), &a);
  std::sort(sorted_auths.begin(), sorted_auths.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second->id < y.second->id;
  });
  std::unordered_map<std::string, AuthEntry> authority;
  for (const auto& [key, a] : sorted_auths) {
    auto [it, fresh] = authority.try_emplace(key);
    if (fresh) it->second.heading = a->heading;
    for (const auto& b : a->broader) {
      auto bkey = HeadingKey(b).str();
      if (bkey == key) continue;
      auto& keys = it->second.broader_keys;
      if (std::find(keys.begin(), keys.end(), bkey) != keys.end()) continue;
      keys.push_back(bkey);
      it->second.broader_display.push_back(b);
    }
  }

  BuildReport report;
  std::map<std::string, std::string> display;  // key -> heading, ordered by key
  std::unordered_set<std::string> assigned;
  std::vector<std::string> frontier;
  for (const BibRecord* b : records) {
    for (const auto& s : b->subjects) {
      auto key = HeadingKey(s).str();
      if (!assigned.insert(key).second) continue;
      auto a = authority.find(key);
      if (a == authority.end()) {
        ++report.orphans;
        display.emplace(key, s);
      } else {
        display.emplace(key, a->second.heading);
      }
      frontier.push_back(key);
    }
  }
  report.assigned_topics = assigned.size();

  // Pull in every broader-term ancestor of an assigned topic.
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    auto a = authority.find(frontier[i]);
    if (a == authority.end()) continue;
    const auto& entry = a->second;
    for (std::size_t j = 0; j < entry.broader_keys.size(); ++j) {
      const auto& bkey = entry.broader_keys[j];
      if (display.count(bkey) != 0) continue;
      auto ba = authority.find(bkey);
      display.emplace(bkey, ba == authority.end() ? entry.broader_display[j] : ba->second.heading);
      frontier.push_back(bkey);
      ++report.ancestors;
    }
  }

  TopicGraph::Parts parts;
  parts.topics.push_back({std::string(kRootHeading), ""});
  std::unordered_map<std::string, TopicId> ids;
  for (const auto& [key, heading] : display) {
    ids.emplace(key, static_cast<TopicId>(parts.topics.size()));
    parts.topics.push_back({heading, key});
  }
  parts.parents.resize(parts.topics.size());
  for (TopicId t = 1; t < parts.topics.size(); ++t) {
    auto a = authority.find(parts.topics[t].key);
    if (a == authority.end()) continue;
    for (const auto& bkey : a->second.broader_keys) parts.parents[t].push_back(ids.at(bkey));
  }
  for (const BibRecord* b : records) {
    parts.record_ids.push_back(b->id);
    auto& ts = parts.record_topics.emplace_back();
    for (const auto& s : b->subjects) ts.push_back(ids.at(HeadingKey(s).str()));
  }
  report.topics = parts.topics.size() - 1;

  auto broken = break_cycles(TopicGraph(std::move(parts)));
  report.cycles_broken = broken.removed.size();
  for (const auto& e : broken.removed) {
    report.removed_edges.emplace_back(broken.graph.heading(e.child),
                                      broken.graph.heading(e.parent));
  }
  return {std::move(broken.graph), std::move(report)};
}

std::uint64_t occurrence_count(const TopicGraph& graph, TopicId t) {
  if (!graph.contains(t)) {
    throw Error(ErrorKind::NotFound, "unknown topic " + std::to_string(t));
  }
  return graph.occurrences(t);
}

TreeStats tree_stats(const TopicGraph& graph) {
  if (!graph.is_acyclic()) throw std::logic_error("tree_stats needs an acyclic graph");
  const std::size_t n = graph.topic_count();
  TreeStats s;
  s.unique_topics = n - 1;
  std::size_t duplicated = 0;
  for (TopicId t = 1; t < n; ++t) {
    auto occ = graph.occurrences(t);
    s.tree_nodes = sat_add(s.tree_nodes, occ);
    if (occ >= 2) ++duplicated;
  }
  s.duplicated_fraction =
      s.unique_topics == 0 ? 0.0
                           : static_cast<double>(duplicated) / static_cast<double>(s.unique_topics);

  // Paths per (topic, depth), parents first.
  std::vector<std::vector<std::uint64_t>> ways(n);
  for (TopicId t : graph.topological_order()) {
    auto& w = ways[t];
    if (t == kRootTopic) {
      w = {1};
    } else {
      for (TopicId p : graph.parents(t)) {
        const auto& wp = ways[p];
        if (w.size() < wp.size() + 1) w.resize(wp.size() + 1, 0);
        for (std::size_t d = 0; d < wp.size(); ++d) w[d + 1] = sat_add(w[d + 1], wp[d]);
      }
    }
    if (w.size() > s.depth_counts.size()) s.depth_counts.resize(w.size(), 0);
    for (std::size_t d = 0; d < w.size(); ++d) {
      s.depth_counts[d] = sat_add(s.depth_counts[d], w[d]);
    }
  }
  s.max_depth = s.depth_counts.empty() ? 0 : s.depth_counts.size() - 1;
  return s;
}

PruneResult prune(const TopicGraph& graph, const PruneParams& params) {
  if (params.threshold < 1) throw std::invalid_argument("prune threshold must be >= 1");
  const std::size_t n = graph.topic_count();
  PruneResult out;
  auto before = graph.is_acyclic() ? tree_stats(graph) : TreeStats{};
  out.report.topics_before = n - 1;
  out.report.nodes_before = before.tree_nodes;
  out.report.depth_before = before.max_depth;

  std::vector<bool> alive(n, true);
  for (TopicId t = 1; t < n; ++t) {
    if (graph.subtree_count(t) < params.threshold) {
      alive[t] = false;
      out.report.removed_by_threshold.push_back(graph.heading(t));
    }
  }

  std::vector<std::vector<TopicId>> parents(n);
  std::vector<std::vector<TopicId>> children(n);
  for (TopicId t = 1; t < n; ++t) {
    if (!alive[t]) continue;
    for (TopicId p : graph.parents(t)) {
      // A surviving topic's parents survive too: subtree counts only grow upward.
      if (alive[p]) {
        parents[t].push_back(p);
        children[p].push_back(t);
      }
    }
  }

  if (params.collapse_chains) {
    auto add_unique = [](std::vector<TopicId>& v, TopicId x) {
      if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    };
    auto erase_value = [](std::vector<TopicId>& v, TopicId x) {
      v.erase(std::remove(v.begin(), v.end(), x), v.end());
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (TopicId t = 1; t < n; ++t) {
        if (!alive[t] || graph.direct_count(t) != 0 || children[t].size() != 1) continue;
        const TopicId c = children[t].front();
        for (TopicId p : parents[t]) {
          erase_value(children[p], t);
          add_unique(children[p], c);
        }
        erase_value(parents[c], t);
        for (TopicId p : parents[t]) add_unique(parents[c], p);
        parents[t].clear();
        children[t].clear();
        alive[t] = false;
        out.report.collapsed.push_back(graph.heading(t));
        changed = true;
      }
    }
  }

  std::vector<TopicId> remap(n, 0);
  TopicGraph::Parts parts;
  for (TopicId t = 0; t < n; ++t) {
    if (!alive[t]) continue;
    remap[t] = static_cast<TopicId>(parts.topics.size());
    parts.topics.push_back(graph.topic(t));
  }
  parts.parents.resize(parts.topics.size());
  for (TopicId t = 1; t < n; ++t) {
    if (!alive[t]) continue;
    for (TopicId p : parents[t]) parts.parents[remap[t]].push_back(remap[p]);
  }
  parts.record_ids = graph.parts().record_ids;
  for (RecordIndex r = 0; r < graph.record_count(); ++r) {
    auto& ts = parts.record_topics.emplace_back();
    for (TopicId t : graph.record_topics(r)) {
      if (alive[t]) ts.push_back(remap[t]);
    }
  }
  out.graph = TopicGraph(std::move(parts));
  auto after = out.graph.is_acyclic() ? tree_stats(out.graph) : TreeStats{};
  out.report.topics_after = out.graph.topic_count() - 1;
  out.report.nodes_after = after.tree_nodes;
  out.report.depth_after = after.max_depth;
  return out;
}

void validate_path(const TopicGraph& graph, std::span<const TopicId> path) {
  if (path.empty()) throw Error(ErrorKind::InvalidPath, "path is empty", 0);
  if (path[0] != kRootTopic) {
    throw Error(ErrorKind::InvalidPath, "step 0: path must start at the root", 0);
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    const TopicId t = path[i];
    if (!graph.contains(t)) {
      throw Error(ErrorKind::InvalidPath,
                  "step " + std::to_string(i) + ": unknown topic " + std::to_string(t), i);
    }
    auto ps = graph.parents(t);
    if (std::find(ps.begin(), ps.end(), path[i - 1]) == ps.end()) {
      throw Error(ErrorKind::InvalidPath,
                  "step " + std::to_string(i) + ": topic " + std::to_string(t) +
                      " is not a child of " + std::to_string(path[i - 1]),
                  i);
    }
  }
}

std::vector<ChildEntry> children_of(const TopicGraph& graph, std::span<const TopicId> path) {
  validate_path(graph, path);
  std::vector<ChildEntry> out;
  for (TopicId c : graph.children(path.back())) {
    out.push_back({c, graph.heading(c), graph.direct_count(c), graph.subtree_count(c),
                   !graph.children(c).empty()});
  }
  return out;
}

std::vector<RecordIndex> records_at(const TopicGraph& graph, TopicId t, bool descendants) {
  if (!graph.contains(t)) {
    throw Error(ErrorKind::NotFound, "unknown topic " + std::to_string(t));
  }
  auto direct = graph.topic_records(t);
  if (!descendants) return {direct.begin(), direct.end()};

  std::vector<bool> seen_topic(graph.topic_count(), false);
  std::vector<bool> hit(graph.record_count(), false);
  std::vector<TopicId> stack{t};
  seen_topic[t] = true;
  while (!stack.empty()) {
    TopicId u = stack.back();
    stack.pop_back();
    for (RecordIndex r : graph.topic_records(u)) hit[r] = true;
    for (TopicId c : graph.children(u)) {
      if (!seen_topic[c]) {
        seen_topic[c] = true;
        stack.push_back(c);
      }
    }
  }
  std::vector<RecordIndex> out;
  for (RecordIndex r = 0; r < hit.size(); ++r) {
    if (hit[r]) out.push_back(r);
  }
  return out;
}

}  // namespace lcsx
