// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lcsx/hierarchy.hpp"
#include "lcsx/ingest.hpp"

namespace lcsx {

enum class Field : std::uint8_t { Title = 0, Statement = 1, Series = 2, Subjects = 3 };
inline constexpr std::size_t kFieldCount = 4;
inline constexpr std::array<std::string_view, kFieldCount> kFieldNames = {
    "title", "statement", "series", "subjects"};

struct Bm25Config {
  double k1 = 1.2;
  double b = 0.75;
  std::array<double, kFieldCount> field_weights = {2.0, 1.0, 1.0, 1.5};

  double weight(Field f) const { return field_weights[static_cast<std::size_t>(f)]; }
  friend bool operator==(const Bm25Config&, const Bm25Config&) = default;
};

/// Case-folds (ASCII) and splits on every character that is not an ASCII
/// letter or digit. Bytes >= 0x80 are kept inside tokens so UTF-8 words
/// survive intact.
std::vector<std::string> tokenize(std::string_view text);

using FieldCounts = std::array<std::uint32_t, kFieldCount>;

struct Posting {
  RecordIndex record;
  FieldCounts tf;

  friend bool operator==(const Posting&, const Posting&) = default;
};

/// Inverted index over the title, statement, series and subject-heading
/// fields of a record collection. Immutable once built.
class Index {
 public:
  Index() = default;

  /// `records` must be in the graph's record order (ascending id). Subject
  /// text comes from the display headings of each record's graph topics.
  static Index build(std::span<const BibRecord> records, const TopicGraph& graph,
                     Bm25Config config = {});

  // Rehydrate from serialized parts; derived averages are recomputed.
  static Index from_parts(std::unordered_map<std::string, std::vector<Posting>> postings,
                          std::vector<FieldCounts> doc_lengths, Bm25Config config);

  std::size_t doc_count() const noexcept { return doc_lengths_.size(); }
  const Bm25Config& config() const noexcept { return config_; }
  const std::vector<Posting>* postings(std::string_view term) const;
  std::size_t doc_frequency(std::string_view term) const;
  std::uint32_t doc_length(RecordIndex r, Field f) const {
    return doc_lengths_.at(r)[static_cast<std::size_t>(f)];
  }
  double avg_length(Field f) const { return avg_lengths_[static_cast<std::size_t>(f)]; }

  const std::unordered_map<std::string, std::vector<Posting>>& all_postings() const noexcept {
    return postings_;
  }
  const std::vector<FieldCounts>& doc_lengths() const noexcept { return doc_lengths_; }

  /// ln(1 + (N - df + 0.5) / (df + 0.5))
  double idf(std::size_t df) const;
  /// BM25 contribution of one term across all weighted fields of a posting.
  double score(const Posting& p, double idf) const;

 private:
  void compute_averages();

  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<FieldCounts> doc_lengths_;
  std::array<double, kFieldCount> avg_lengths_{};
  Bm25Config config_;
};

struct Query {
  std::vector<std::string> terms;
  std::optional<TopicId> topic_filter;
  bool descendants = false;
  std::size_t limit = 10;
  std::size_t offset = 0;
};

/// Builds a Query from free text; duplicate terms are collapsed.
Query make_query(std::string_view text);

struct ScoredRecord {
  RecordIndex record;
  double score;

  friend bool operator==(const ScoredRecord&, const ScoredRecord&) = default;
};

/// The full ordering for a query, before paging: records that contain every
/// term in some field, restricted to the topic filter when present, sorted by
/// descending score then record id. A topic filter without terms lists the
/// filter's records unscored in id order. Throws Error(EmptyQuery) when there
/// are neither terms nor a filter, Error(NotFound) for an unknown filter topic
/// and Error(BadRequest) for limit 0.
std::vector<ScoredRecord> rank(const Index& index, const TopicGraph& graph, const Query& query);

struct AssignedTopic {
  TopicId id;
  std::string heading;
};

struct RankedResult {
  RecordIndex record;
  std::string id;
  double score;
  std::string title;
  std::optional<std::string> statement;
  std::optional<int> year;
  std::optional<std::string> series;
  std::vector<AssignedTopic> assigned_topics;
};

struct SearchPage {
  std::size_t total = 0;
  std::vector<RankedResult> results;
};

RankedResult describe(const TopicGraph& graph, std::span<const BibRecord> records,
                      const ScoredRecord& hit);

/// Window [offset, offset + limit) of a full ranking.
SearchPage page(const TopicGraph& graph, std::span<const BibRecord> records,
                std::span<const ScoredRecord> ranking, std::size_t offset, std::size_t limit);

SearchPage search(const Index& index, const TopicGraph& graph, std::span<const BibRecord> records,
                  const Query& query);

}  // namespace lcsx
