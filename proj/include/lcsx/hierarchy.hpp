// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lcsx/ingest.hpp"

namespace lcsx {

using TopicId = std::uint32_t;
using RecordIndex = std::uint32_t;

inline constexpr TopicId kRootTopic = 0;
inline constexpr std::string_view kRootHeading = "All Collection Subjects";

/// One occurrence (copy) of a topic in the unfolded tree: the topic ids along
/// a root path, starting with kRootTopic.
using TreePath = std::vector<TopicId>;

struct Topic {
  std::string heading;  // display form
  std::string key;      // HeadingKey string; empty for the root

  friend bool operator==(const Topic&, const Topic&) = default;
};

// Child-to-parent DAG over interned topics, plus the record assignments that
// give each topic its counts.
//
// Topic ids are dense and, apart from the root at 0, assigned in ascending
// key order, so id order and key order agree. The graph may be built with
// cycles (break_cycles takes such graphs); the unfolding queries
// (occurrence_count, tree_stats, nearest_copy) require an acyclic graph.
class TopicGraph {
 public:
  struct Parts {
    std::vector<Topic> topics;                     // [0] is the root
    std::vector<std::vector<TopicId>> parents;     // per topic
    std::vector<std::string> record_ids;           // ascending
    std::vector<std::vector<TopicId>> record_topics;

    friend bool operator==(const Parts&, const Parts&) = default;
  };

  TopicGraph();  // root only
  // Parent lists are sorted and deduplicated, and non-root topics with no
  // parent are attached to the root. Throws std::invalid_argument on
  // out-of-range ids, a parented root, or unsorted record ids.
  explicit TopicGraph(Parts parts);

  const Parts& parts() const noexcept { return parts_; }

  std::size_t topic_count() const noexcept { return parts_.topics.size(); }
  std::size_t record_count() const noexcept { return parts_.record_ids.size(); }
  bool contains(TopicId t) const noexcept { return t < topic_count(); }

  const Topic& topic(TopicId t) const { return parts_.topics.at(t); }
  const std::string& heading(TopicId t) const { return topic(t).heading; }
  std::optional<TopicId> find(const HeadingKey& key) const;

  std::span<const TopicId> parents(TopicId t) const { return parts_.parents.at(t); }
  /// Children in browse order: descending subtree_count, then ascending key.
  std::span<const TopicId> children(TopicId t) const { return children_.at(t); }

  std::uint32_t direct_count(TopicId t) const { return direct_count_.at(t); }
  std::uint32_t subtree_count(TopicId t) const { return subtree_count_.at(t); }

  const std::string& record_id(RecordIndex r) const { return parts_.record_ids.at(r); }
  std::optional<RecordIndex> find_record(std::string_view id) const;
  std::span<const TopicId> record_topics(RecordIndex r) const {
    return parts_.record_topics.at(r);
  }
  std::span<const RecordIndex> topic_records(TopicId t) const { return topic_records_.at(t); }

  bool is_acyclic() const noexcept { return acyclic_; }
  /// Parents before children. Empty when the graph has a cycle.
  std::span<const TopicId> topological_order() const noexcept { return topo_; }

  /// Number of root paths ending at t, saturating at UINT64_MAX.
  /// Throws std::logic_error on a cyclic graph.
  std::uint64_t occurrences(TopicId t) const;

 private:
  void derive();

  Parts parts_;
  std::unordered_map<std::string, TopicId> by_key_;
  std::vector<std::vector<TopicId>> children_;
  std::vector<std::uint32_t> direct_count_;
  std::vector<std::uint32_t> subtree_count_;
  std::vector<std::vector<RecordIndex>> topic_records_;
  std::vector<TopicId> topo_;
  std::vector<std::uint64_t> occurrences_;
  bool acyclic_ = true;
};

struct Edge {
  TopicId child;
  TopicId parent;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct CycleBreakResult {
  TopicGraph graph;
  std::vector<Edge> removed;
};

/// Makes the graph acyclic. Topics are visited in ascending key order, each
/// starting a depth-first walk up its parent lists; any parent edge that
/// reaches back into the current walk's stack is removed. Deterministic, and
/// a second run removes nothing.
CycleBreakResult break_cycles(const TopicGraph& graph);

struct BuildReport {
  std::size_t topics = 0;  // excluding the root
  std::size_t assigned_topics = 0;
  std::size_t orphans = 0;
  std::size_t ancestors = 0;
  std::size_t cycles_broken = 0;
  std::vector<std::pair<std::string, std::string>> removed_edges;  // (child, parent) headings
};

struct BuildResult {
  TopicGraph graph;
  BuildReport report;
};

/// Interns every bib subject plus the broader-term ancestors reachable from
/// them, parents subjects without an authority record (and ancestors without
/// broader terms) to the root, breaks cycles, and computes counts. Records
/// are ordered by id. Throws Error(DuplicateId) for repeated record ids.
BuildResult build_graph(std::span<const AuthorityRecord> auths, std::span<const BibRecord> bibs);

std::uint64_t occurrence_count(const TopicGraph& graph, TopicId t);

struct TreeStats {
  std::size_t unique_topics = 0;      // excluding the root
  std::uint64_t tree_nodes = 0;       // unfolded copies of non-root topics
  double duplicated_fraction = 0.0;   // share of topics with >= 2 copies
  std::size_t max_depth = 0;          // edges on the longest root path
  std::vector<std::uint64_t> depth_counts;  // unfolded nodes per depth; [0] is the root

  friend bool operator==(const TreeStats&, const TreeStats&) = default;
};

TreeStats tree_stats(const TopicGraph& graph);

struct PruneParams {
  std::uint32_t threshold = 1;
  bool collapse_chains = true;

  friend bool operator==(const PruneParams&, const PruneParams&) = default;
};

struct PruneReport {
  std::vector<std::string> removed_by_threshold;  // headings
  std::vector<std::string> collapsed;             // headings
  std::size_t topics_before = 0;
  std::size_t topics_after = 0;
  std::uint64_t nodes_before = 0;
  std::uint64_t nodes_after = 0;
  std::size_t depth_before = 0;
  std::size_t depth_after = 0;
};

struct PruneResult {
  TopicGraph graph;
  PruneReport report;
};

/// Drops topics whose subtree_count is below the threshold, then (optionally)
/// splices out record-less topics that have exactly one child, until none is
/// left. Surviving topics are renumbered densely in the same order.
/// Throws std::invalid_argument for threshold 0.
PruneResult prune(const TopicGraph& graph, const PruneParams& params);

/// Throws Error(InvalidPath) naming the first bad step.
void validate_path(const TopicGraph& graph, std::span<const TopicId> path);

struct ChildEntry {
  TopicId id;
  std::string heading;
  std::uint32_t direct_count;
  std::uint32_t subtree_count;
  bool has_children;
};

std::vector<ChildEntry> children_of(const TopicGraph& graph, std::span<const TopicId> path);

/// Records assigned to t (or, with descendants, to any DAG descendant of t),
/// in record id order. Throws Error(NotFound) for an unknown topic.
std::vector<RecordIndex> records_at(const TopicGraph& graph, TopicId t, bool descendants);

}  // namespace lcsx
