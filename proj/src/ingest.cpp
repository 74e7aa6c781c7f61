// SPDX-License-Identifier: Apache-2.0
#include "lcsx/ingest.hpp"

#include <istream>
#include <ostream>
#include <unordered_set>

#include "lcsx/error.hpp"

namespace lcsx {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char fold(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// One rewriting pass over already space-collapsed text: every run of two or
// more hyphens, together with at most one space on either side, becomes "--".
std::string canonicalize_separators(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      std::size_t j = i;
      while (j < s.size() && s[j] == '-') ++j;
      if (!out.empty() && out.back() == ' ') out.pop_back();
      out += "--";
      if (j < s.size() && s[j] == ' ') ++j;
      i = j;
    } else {
      out += s[i++];
    }
  }
  return out;
}

}  // namespace

HeadingKey::HeadingKey(std::string_view raw) {
  std::string collapsed;
  collapsed.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed += ' ';
    pending_space = false;
    collapsed += fold(c);
  }
  // Each changing pass strictly shortens the string, so this terminates; the
  // fixpoint is what makes normalization idempotent for inputs like "a-- -b".
  for (;;) {
    std::string next = canonicalize_separators(collapsed);
    if (next == collapsed) break;
    collapsed = std::move(next);
  }
  if (collapsed.empty()) {
    throw Error(ErrorKind::EmptyHeading, "heading is empty after normalization");
  }
  key_ = std::move(collapsed);
}

HeadingKey normalize_heading(std::string_view raw) { return HeadingKey(raw); }

std::size_t dedupe_headings(std::vector<std::string>& headings, const HeadingKey* self,
                            std::size_t* self_dropped) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> kept;
  kept.reserve(headings.size());
  std::size_t duplicates = 0;
  for (auto& h : headings) {
    HeadingKey key(h);
    if (self != nullptr && key == *self) {
      if (self_dropped != nullptr) ++*self_dropped;
      continue;
    }
    if (!seen.insert(key.str()).second) {
      ++duplicates;
      continue;
    }
    kept.push_back(std::move(h));
  }
  headings = std::move(kept);
  return duplicates;
}

namespace {

using nlohmann::json;

Error schema_error(std::size_t line, const std::string& what) {
  if (line == 0) return Error(ErrorKind::Schema, what);
  return Error(ErrorKind::Schema, "line " + std::to_string(line) + ": " + what, line);
}

std::string required_string(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    throw schema_error(line, std::string("missing required field '") + field + "'");
  }
  if (!it->is_string()) {
    throw schema_error(line, std::string("field '") + field + "' must be a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* field,
                                           std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw schema_error(line, std::string("field '") + field + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const char* field, std::size_t line) {
  std::vector<std::string> out;
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) {
    throw schema_error(line, std::string("field '") + field + "' must be an array");
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw schema_error(line, std::string("field '") + field + "' must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

// Calls `fn(object, line_number)` for every non-blank line.
template <class Fn>
void for_each_object(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) {
      if (!is_space(c)) {
        blank = false;
        break;
      }
    }
    if (blank) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + e.what(),
                  line_no);
    }
    if (!obj.is_object()) throw schema_error(line_no, "expected a JSON object");
    fn(obj, line_no);
  }
}

void check_unique_id(std::unordered_set<std::string>& ids, const std::string& id,
                     std::size_t line) {
  if (!ids.insert(id).second) {
    throw Error(ErrorKind::DuplicateId,
                "duplicate record id '" + id + "' at line " + std::to_string(line), line);
  }
}

}  // namespace

BibRecord bib_from_json(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw schema_error(line, "expected a JSON object");
  BibRecord r;
  r.id = required_string(obj, "id", line);
  if (r.id.empty()) throw schema_error(line, "field 'id' must not be empty");
  r.title = required_string(obj, "title", line);
  r.statement = optional_string(obj, "statement", line);
  r.series = optional_string(obj, "series", line);
  if (auto it = obj.find("year"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw schema_error(line, "field 'year' must be an integer");
    r.year = it->get<int>();
  }
  r.subjects = string_list(obj, "subjects", line);
  return r;
}

AuthorityRecord auth_from_json(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw schema_error(line, "expected a JSON object");
  AuthorityRecord r;
  r.id = required_string(obj, "id", line);
  if (r.id.empty()) throw schema_error(line, "field 'id' must not be empty");
  r.heading = required_string(obj, "heading", line);
  r.broader = string_list(obj, "broader", line);
  return r;
}

Parsed<BibRecord> parse_bib_jsonl(std::istream& in) {
  Parsed<BibRecord> out;
  std::unordered_set<std::string> ids;
  for_each_object(in, [&](const json& obj, std::size_t line) {
    BibRecord r = bib_from_json(obj, line);
    check_unique_id(ids, r.id, line);
    try {
      out.warnings.duplicate_subjects += dedupe_headings(r.subjects);
    } catch (const Error&) {
      throw schema_error(line, "empty subject heading");
    }
    out.records.push_back(std::move(r));
  });
  return out;
}

Parsed<AuthorityRecord> parse_auth_jsonl(std::istream& in) {
  Parsed<AuthorityRecord> out;
  std::unordered_set<std::string> ids;
  for_each_object(in, [&](const json& obj, std::size_t line) {
    AuthorityRecord r = auth_from_json(obj, line);
    check_unique_id(ids, r.id, line);
    try {
      HeadingKey self(r.heading);
      out.warnings.duplicate_broader +=
          dedupe_headings(r.broader, &self, &out.warnings.self_broader);
    } catch (const Error&) {
      throw schema_error(line, "empty heading");
    }
    out.records.push_back(std::move(r));
  });
  return out;
}

nlohmann::json to_json(const BibRecord& r) {
  json j = json::object();
  j["id"] = r.id;
  j["title"] = r.title;
  if (r.statement) j["statement"] = *r.statement;
  if (r.year) j["year"] = *r.year;
  if (r.series) j["series"] = *r.series;
  j["subjects"] = r.subjects;
  return j;
}

nlohmann::json to_json(const AuthorityRecord& r) {
  json j = json::object();
  j["id"] = r.id;
  j["heading"] = r.heading;
  j["broader"] = r.broader;
  return j;
}

void write_bib_jsonl(std::ostream& out, std::span<const BibRecord> records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

void write_auth_jsonl(std::ostream& out, std::span<const AuthorityRecord> records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

}  // namespace lcsx
