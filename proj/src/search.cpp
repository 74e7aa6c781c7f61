// SPDX-License-Identifier: Apache-2.0
#include "lcsx/search.hpp"

#include <algorithm>
#include <cmath>

#include "lcsx/error.hpp"

namespace lcsx {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

void add_field(std::unordered_map<std::string, FieldCounts>& tf, FieldCounts& lengths, Field f,
               std::string_view text) {
  const auto slot = static_cast<std::size_t>(f);
  for (auto& term : tokenize(text)) {
    ++tf[term][slot];
    ++lengths[slot];
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Index Index::build(std::span<const BibRecord> records, const TopicGraph& graph,
                   Bm25Config config) {
  if (records.size() != graph.record_count()) {
    throw std::invalid_argument("record store does not match the topic graph");
  }
  Index idx;
  idx.config_ = config;
  idx.doc_lengths_.assign(records.size(), FieldCounts{});
  for (RecordIndex r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.id != graph.record_id(r)) {
      throw std::invalid_argument("record store order differs from the topic graph");
    }
    std::unordered_map<std::string, FieldCounts> tf;
    auto& len = idx.doc_lengths_[r];
    add_field(tf, len, Field::Title, rec.title);
    if (rec.statement) add_field(tf, len, Field::Statement, *rec.statement);
    if (rec.series) add_field(tf, len, Field::Series, *rec.series);
    for (TopicId t : graph.record_topics(r)) add_field(tf, len, Field::Subjects, graph.heading(t));
    for (auto& [term, counts] : tf) idx.postings_[term].push_back({r, counts});
  }
  idx.compute_averages();
  return idx;
}

Index Index::from_parts(std::unordered_map<std::string, std::vector<Posting>> postings,
                        std::vector<FieldCounts> doc_lengths, Bm25Config config) {
  Index idx;
  idx.postings_ = std::move(postings);
  idx.doc_lengths_ = std::move(doc_lengths);
  idx.config_ = config;
  for (auto& [term, list] : idx.postings_) {
    for (const auto& p : list) {
      if (p.record >= idx.doc_lengths_.size()) {
        throw std::invalid_argument("posting for term '" + term + "' names an unknown record");
      }
    }
  }
  idx.compute_averages();
  return idx;
}

void Index::compute_averages() {
  avg_lengths_.fill(0.0);
  if (doc_lengths_.empty()) return;
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    double total = 0.0;
    for (const auto& len : doc_lengths_) total += len[f];
    avg_lengths_[f] = total / static_cast<double>(doc_lengths_.size());
  }
}

const std::vector<Posting>* Index::postings(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  return it == postings_.end() ? nullptr : &it->second;
}

std::size_t Index::doc_frequency(std::string_view term) const {
  const auto* p = postings(term);
  return p == nullptr ? 0 : p->size();
}

double Index::idf(std::size_t df) const {
  const double n = static_cast<double>(doc_count());
  const double d = static_cast<double>(df);
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double Index::score(const Posting& p, double idf) const {
  const double k1 = config_.k1;
  const double b = config_.b;
  double total = 0.0;
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    const std::uint32_t tf = p.tf[f];
    if (tf == 0) continue;
    const double norm = avg_lengths_[f] > 0.0
                            ? static_cast<double>(doc_lengths_[p.record][f]) / avg_lengths_[f]
                            : 1.0;
    const double t = static_cast<double>(tf);
    total += config_.field_weights[f] * idf * (t * (k1 + 1.0)) / (t + k1 * (1.0 - b + b * norm));
  }
  return total;
}

Query make_query(std::string_view text) {
  Query q;
  for (auto& term : tokenize(text)) {
    if (std::find(q.terms.begin(), q.terms.end(), term) == q.terms.end()) {
      q.terms.push_back(std::move(term));
    }
  }
  return q;
}

std::vector<ScoredRecord> rank(const Index& index, const TopicGraph& graph, const Query& query) {
  if (query.limit == 0) throw Error(ErrorKind::BadRequest, "limit must be at least 1");
  if (query.terms.empty() && !query.topic_filter) {
    throw Error(ErrorKind::EmptyQuery, "query has neither terms nor a topic filter");
  }

  std::vector<RecordIndex> filter;
  if (query.topic_filter) filter = records_at(graph, *query.topic_filter, query.descendants);

  std::vector<ScoredRecord> out;
  if (query.terms.empty()) {
    out.reserve(filter.size());
    for (RecordIndex r : filter) out.push_back({r, 0.0});
    return out;
  }

  const std::size_t n = index.doc_count();
  std::vector<std::uint32_t> matched(n, 0);
  std::vector<double> scores(n, 0.0);
  for (const auto& term : query.terms) {
    const auto* list = index.postings(term);
    if (list == nullptr) return out;
    const double idf = index.idf(list->size());
    for (const auto& p : *list) {
      ++matched[p.record];
      scores[p.record] += index.score(p, idf);
    }
  }
  const auto need = static_cast<std::uint32_t>(query.terms.size());
  if (query.topic_filter) {
    for (RecordIndex r : filter) {
      if (matched[r] == need) out.push_back({r, scores[r]});
    }
  } else {
    for (RecordIndex r = 0; r < n; ++r) {
      if (matched[r] == need) out.push_back({r, scores[r]});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredRecord& a, const ScoredRecord& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.record < b.record;
  });
  return out;
}

RankedResult describe(const TopicGraph& graph, std::span<const BibRecord> records,
                      const ScoredRecord& hit) {
  const auto& rec = records[hit.record];
  RankedResult r{hit.record, rec.id, hit.score, rec.title, rec.statement, rec.year, rec.series, {}};
  for (TopicId t : graph.record_topics(hit.record)) {
    r.assigned_topics.push_back({t, graph.heading(t)});
  }
  return r;
}

SearchPage page(const TopicGraph& graph, std::span<const BibRecord> records,
                std::span<const ScoredRecord> ranking, std::size_t offset, std::size_t limit) {
  SearchPage out;
  out.total = ranking.size();
  for (std::size_t i = offset; i < ranking.size() && i - offset < limit; ++i) {
    out.results.push_back(describe(graph, records, ranking[i]));
  }
  return out;
}

SearchPage search(const Index& index, const TopicGraph& graph, std::span<const BibRecord> records,
                  const Query& query) {
  auto ranking = rank(index, graph, query);
  return page(graph, records, ranking, query.offset, query.limit);
}

}  // namespace lcsx
