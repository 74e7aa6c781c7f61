// SPDX-License-Identifier: Apache-2.0
#include "lcsx/coordination.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "lcsx/error.hpp"

namespace lcsx {

namespace {

void require_topic(const TopicGraph& graph, TopicId t) {
  if (!graph.contains(t)) throw Error(ErrorKind::NotFound, "unknown topic " + std::to_string(t));
}

struct Candidate {
  std::size_t overlap = 0;
  TreePath path;
};

// Better = more shared topics, then shorter, then lexicographically smaller.
bool better(const Candidate& a, const Candidate& b) {
  if (a.overlap != b.overlap) return a.overlap > b.overlap;
  if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
  return a.path < b.path;
}

}  // namespace

std::vector<PromisingBranch> promising_branches(std::span<const RecordIndex> ranked,
                                                const TopicGraph& graph,
                                                const SessionState& session) {
  struct Tally {
    std::uint32_t support = 0;
    std::size_t best_rank = 0;
  };
  std::unordered_map<TopicId, Tally> tally;
  const std::size_t window = std::min(ranked.size(), kPromisingWindow);
  for (std::size_t rank = 0; rank < window; ++rank) {
    for (TopicId t : graph.record_topics(ranked[rank])) {
      auto [it, fresh] = tally.try_emplace(t);
      if (fresh) it->second.best_rank = rank;
      ++it->second.support;
    }
  }

  std::vector<std::pair<TopicId, Tally>> order(tally.begin(), tally.end());
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.second.support != b.second.support) return a.second.support > b.second.support;
    if (a.second.best_rank != b.second.best_rank) return a.second.best_rank < b.second.best_rank;
    const auto& ka = graph.topic(a.first).key;
    const auto& kb = graph.topic(b.first).key;
    if (ka != kb) return ka < kb;
    return a.first < b.first;
  });

  std::vector<PromisingBranch> out;
  std::optional<std::span<const TopicId>> anchor;
  if (session.last_selected) anchor = std::span<const TopicId>(*session.last_selected);
  for (std::size_t i = 0; i < order.size() && i < kPromisingBranches; ++i) {
    out.push_back({order[i].first, nearest_copy(graph, order[i].first, anchor),
                   order[i].second.support});
  }
  return out;
}

TreePath nearest_copy(const TopicGraph& graph, TopicId topic,
                      std::optional<std::span<const TopicId>> anchor) {
  require_topic(graph, topic);
  if (!graph.is_acyclic()) throw std::logic_error("nearest_copy needs an acyclic graph");

  std::unordered_set<TopicId> anchor_set;
  if (anchor) {
    validate_path(graph, *anchor);
    anchor_set.insert(anchor->begin(), anchor->end());
  } else {
    anchor_set.insert(kRootTopic);
  }

  // Ancestors of the topic (inclusive); best paths only ever pass through them.
  std::vector<bool> relevant(graph.topic_count(), false);
  std::vector<TopicId> stack{topic};
  relevant[topic] = true;
  while (!stack.empty()) {
    TopicId t = stack.back();
    stack.pop_back();
    for (TopicId p : graph.parents(t)) {
      if (!relevant[p]) {
        relevant[p] = true;
        stack.push_back(p);
      }
    }
  }

  // Overlap is additive along a path and lengths grow by one per step, so
  // the best path to a topic extends the best path to one of its parents.
  std::unordered_map<TopicId, Candidate> best;
  for (TopicId t : graph.topological_order()) {
    if (!relevant[t]) continue;
    const std::size_t own = anchor_set.count(t);
    if (t == kRootTopic) {
      best[t] = {own, {kRootTopic}};
    } else {
      std::optional<Candidate> pick;
      for (TopicId p : graph.parents(t)) {
        const auto& from = best.at(p);
        Candidate c{from.overlap + own, from.path};
        c.path.push_back(t);
        if (!pick || better(c, *pick)) pick = std::move(c);
      }
      best[t] = std::move(*pick);
    }
    if (t == topic) break;
  }
  return best.at(topic).path;
}

SessionState select_topic(SessionState session, const TopicGraph& graph,
                          std::span<const TopicId> path) {
  if (path.empty()) return clear_filter(std::move(session));
  validate_path(graph, path);
  session.last_selected = TreePath(path.begin(), path.end());
  session.visited.insert(path.back());
  session.topic_filter = TopicFilter{path.back(), session.descendants};
  return session;
}

SessionState clear_filter(SessionState session) {
  session.topic_filter.reset();
  return session;
}

SessionState set_descendants(SessionState session, bool descendants) {
  session.descendants = descendants;
  if (session.topic_filter) session.topic_filter->descendants = descendants;
  return session;
}

TreePath expand_to(const TopicGraph& graph, const SessionState& session, TopicId topic) {
  std::optional<std::span<const TopicId>> anchor;
  if (session.last_selected) anchor = std::span<const TopicId>(*session.last_selected);
  return nearest_copy(graph, topic, anchor);
}

std::uint64_t copy_count(const TopicGraph& graph, TopicId topic) {
  return occurrence_count(graph, topic);
}

}  // namespace lcsx
