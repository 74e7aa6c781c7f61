// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lcsx/hierarchy.hpp"

namespace lcsx {

struct TopicFilter {
  TopicId topic;
  bool descendants;

  friend bool operator==(const TopicFilter&, const TopicFilter&) = default;
};

/// Client-held interaction state; every operation takes and returns it by value.
struct SessionState {
  std::optional<TreePath> last_selected;
  std::set<TopicId> visited;
  std::optional<std::vector<std::string>> active_query;
  std::optional<TopicFilter> topic_filter;
  bool descendants = false;  // mode applied to the next selection

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

struct PromisingBranch {
  TopicId topic;
  TreePath path;
  std::uint32_t support;

  friend bool operator==(const PromisingBranch&, const PromisingBranch&) = default;
};

inline constexpr std::size_t kPromisingWindow = 100;
inline constexpr std::size_t kPromisingBranches = 2;

/// The two topics assigned to the most records among the first 100 of
/// `ranked` (one vote per record). Ties go to the topic whose best-ranked
/// record ranks higher, then to the smaller key. Each topic is mapped to the
/// copy nearest the session's last selection.
std::vector<PromisingBranch> promising_branches(std::span<const RecordIndex> ranked,
                                                const TopicGraph& graph,
                                                const SessionState& session);

/// The copy of `topic` whose root path shares the most topics with `anchor`
/// (the root alone when absent). Ties prefer the shorter path, then the
/// lexicographically smaller id sequence. Runs a DP over the topic's
/// ancestors rather than enumerating copies.
/// Throws Error(NotFound) for an unknown topic, Error(InvalidPath) for a bad anchor.
TreePath nearest_copy(const TopicGraph& graph, TopicId topic,
                      std::optional<std::span<const TopicId>> anchor = std::nullopt);

/// Selecting a tree node: it becomes the anchor and the filter, and its topic
/// is marked visited. An empty path clears the filter instead.
SessionState select_topic(SessionState session, const TopicGraph& graph,
                          std::span<const TopicId> path);
SessionState clear_filter(SessionState session);
/// Changes the descendants mode and re-applies it to an active filter.
SessionState set_descendants(SessionState session, bool descendants);

/// Hyperlink expansion: where to reveal `topic`. Leaves the session alone.
TreePath expand_to(const TopicGraph& graph, const SessionState& session, TopicId topic);

std::uint64_t copy_count(const TopicGraph& graph, TopicId topic);

}  // namespace lcsx
