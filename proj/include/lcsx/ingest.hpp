// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lcsx {

/// Normalized form of a subject heading, used to match bibliographic subject
/// strings against authority headings. Case-folded (ASCII), whitespace
/// collapsed, and every hyphen run of two or more (with any surrounding
/// spaces) rewritten to "--".
class HeadingKey {
 public:
  /// Throws Error(EmptyHeading) when nothing is left after normalization.
  explicit HeadingKey(std::string_view raw);

  const std::string& str() const noexcept { return key_; }

  friend auto operator<=>(const HeadingKey&, const HeadingKey&) = default;
  friend bool operator==(const HeadingKey&, const HeadingKey&) = default;

 private:
  std::string key_;
};

HeadingKey normalize_heading(std::string_view raw);

struct AuthorityRecord {
  std::string id;
  std::string heading;
  std::vector<std::string> broader;

  friend bool operator==(const AuthorityRecord&, const AuthorityRecord&) = default;
};

struct BibRecord {
  std::string id;
  std::string title;
  std::optional<std::string> statement;
  std::optional<int> year;
  std::optional<std::string> series;
  std::vector<std::string> subjects;

  friend bool operator==(const BibRecord&, const BibRecord&) = default;
};

// Non-fatal oddities met while parsing. Offending entries are dropped.
struct ParseWarnings {
  std::size_t duplicate_subjects = 0;
  std::size_t duplicate_broader = 0;
  std::size_t self_broader = 0;
  std::size_t ignored_fields = 0;  // ISO 2709 only: non-topical subject fields

  friend bool operator==(const ParseWarnings&, const ParseWarnings&) = default;
};

template <class Record>
struct Parsed {
  std::vector<Record> records;
  ParseWarnings warnings;
};

// Drop later entries that normalize equal to an earlier one (or to `self`).
// Returns the number of dropped duplicates; self matches are counted into
// `self_dropped` when provided.
std::size_t dedupe_headings(std::vector<std::string>& headings,
                            const HeadingKey* self = nullptr,
                            std::size_t* self_dropped = nullptr);

// Field extraction and type checks for one JSON object; unknown fields are
// ignored. `line` is only used for error messages. Throws Error(Schema).
BibRecord bib_from_json(const nlohmann::json& obj, std::size_t line = 0);
AuthorityRecord auth_from_json(const nlohmann::json& obj, std::size_t line = 0);

Parsed<BibRecord> parse_bib_jsonl(std::istream& in);
Parsed<AuthorityRecord> parse_auth_jsonl(std::istream& in);

nlohmann::json to_json(const BibRecord& record);
nlohmann::json to_json(const AuthorityRecord& record);

// Canonical JSONL: one object per line, keys sorted, absent optionals omitted.
void write_bib_jsonl(std::ostream& out, std::span<const BibRecord> records);
void write_auth_jsonl(std::ostream& out, std::span<const AuthorityRecord> records);

}  // namespace lcsx
