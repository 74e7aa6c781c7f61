// SPDX-License-Identifier: Apache-2.0
#include "lcsx/iso2709.hpp"

#include <unordered_set>

#include "lcsx/error.hpp"

namespace lcsx::iso2709 {

namespace {

constexpr std::size_t kLeaderSize = 24;
constexpr std::size_t kEntrySize = 12;

Error malformed(std::size_t offset, const std::string& what) {
  return Error(ErrorKind::MalformedRecord,
               "malformed record at byte " + std::to_string(offset) + ": " + what, offset);
}

bool parse_digits(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  out = v;
  return true;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

Field parse_field(std::string_view tag, std::string_view body, std::size_t offset) {
  Field f;
  f.tag = std::string(tag);
  if (f.is_control()) {
    f.data = std::string(body);
    return f;
  }
  if (body.size() < 2) throw malformed(offset, "data field " + f.tag + " lacks indicators");
  f.indicator1 = body[0];
  f.indicator2 = body[1];
  std::string_view rest = body.substr(2);
  if (!rest.empty() && rest.front() != kSubfieldDelimiter) {
    throw malformed(offset, "data field " + f.tag + " has bytes before its first subfield");
  }
  while (!rest.empty()) {
    rest.remove_prefix(1);  // delimiter
    auto next = rest.find(kSubfieldDelimiter);
    std::string_view chunk = rest.substr(0, next);
    if (!chunk.empty()) f.subfields.push_back({chunk.front(), std::string(chunk.substr(1))});
    if (next == std::string_view::npos) break;
    rest.remove_prefix(next);
  }
  return f;
}

// Subfield a, then every x/v/y/z in field order, joined with "--".
std::string subdivided_heading(const Field& f) {
  std::string out;
  for (const auto& sf : f.subfields) {
    if (sf.code == 'a') {
      out = trim(sf.value);
      break;
    }
  }
  if (out.empty()) return out;
  for (const auto& sf : f.subfields) {
    if (sf.code == 'x' || sf.code == 'v' || sf.code == 'y' || sf.code == 'z') {
      auto part = trim(sf.value);
      if (!part.empty()) out += "--" + part;
    }
  }
  return out;
}

std::optional<int> first_year(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] >= '0' && s[i] <= '9') {
      std::size_t j = i;
      while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
      if (j - i == 4) return std::stoi(std::string(s.substr(i, 4)));
      i = j;
    } else {
      ++i;
    }
  }
  return std::nullopt;
}

Error schema(std::size_t ordinal, const std::string& what) {
  return Error(ErrorKind::Schema, "record " + std::to_string(ordinal) + ": " + what, ordinal);
}

void check_id(std::unordered_set<std::string>& ids, const std::string& id, std::size_t ordinal) {
  if (!ids.insert(id).second) {
    throw Error(ErrorKind::DuplicateId,
                "duplicate record id '" + id + "' in record " + std::to_string(ordinal),
                ordinal);
  }
}

}  // namespace

std::string_view Field::first(char code) const {
  for (const auto& sf : subfields) {
    if (sf.code == code) return sf.value;
  }
  return {};
}

const Field* Record::find(std::string_view tag) const {
  for (const auto& f : fields) {
    if (f.tag == tag) return &f;
  }
  return nullptr;
}

std::vector<Record> read_records(std::string_view bytes) {
  std::vector<Record> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    // Line breaks between records are tolerated.
    if (bytes[pos] == '\n' || bytes[pos] == '\r') {
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    if (bytes.size() - start < kLeaderSize) throw malformed(start, "truncated leader");
    std::string_view leader = bytes.substr(start, kLeaderSize);
    std::size_t length = 0;
    std::size_t base = 0;
    if (!parse_digits(leader.substr(0, 5), length)) {
      throw malformed(start, "record length is not numeric");
    }
    if (length <= kLeaderSize) throw malformed(start, "record length too small");
    if (length > bytes.size() - start) {
      throw malformed(start, "record length exceeds available bytes");
    }
    std::string_view rec = bytes.substr(start, length);
    if (rec.back() != kRecordTerminator) throw malformed(start, "missing record terminator");
    if (leader[9] != 'a') {
      throw Error(ErrorKind::UnsupportedEncoding,
                  "record at byte " + std::to_string(start) +
                      " is not UTF-8 (leader position 9 must be 'a')",
                  start);
    }
    if (!parse_digits(leader.substr(12, 5), base) || base <= kLeaderSize || base >= length) {
      throw malformed(start, "invalid base address of data");
    }
    if (rec[base - 1] != kFieldTerminator) {
      throw malformed(start + base - 1, "directory is not terminated");
    }
    const std::size_t dir_size = base - 1 - kLeaderSize;
    if (dir_size % kEntrySize != 0) {
      throw malformed(start + kLeaderSize, "directory length is not a multiple of 12");
    }

    Record record;
    record.leader = std::string(leader);
    record.offset = start;
    for (std::size_t e = kLeaderSize; e < base - 1; e += kEntrySize) {
      std::string_view entry = rec.substr(e, kEntrySize);
      std::size_t flen = 0;
      std::size_t fstart = 0;
      if (!parse_digits(entry.substr(3, 4), flen) || !parse_digits(entry.substr(7, 5), fstart)) {
        throw malformed(start + e, "directory entry is not numeric");
      }
      // Field data must sit inside the data area, before the record terminator.
      if (flen == 0 || base + fstart + flen > length - 1) {
        throw malformed(start + e, "directory entry points outside the record");
      }
      std::string_view body = rec.substr(base + fstart, flen);
      if (body.back() != kFieldTerminator) {
        throw malformed(start + base + fstart, "field is not terminated");
      }
      body.remove_suffix(1);
      record.fields.push_back(parse_field(entry.substr(0, 3), body, start + base + fstart));
    }
    out.push_back(std::move(record));
    pos = start + length;
  }
  return out;
}

Parsed<BibRecord> parse_bib(std::string_view bytes) {
  Parsed<BibRecord> out;
  std::unordered_set<std::string> ids;
  std::size_t ordinal = 0;
  for (const auto& rec : read_records(bytes)) {
    ++ordinal;
    BibRecord r;
    const Field* f001 = rec.find("001");
    if (f001 == nullptr || trim(f001->data).empty()) throw schema(ordinal, "missing 001");
    r.id = trim(f001->data);
    check_id(ids, r.id, ordinal);
    const Field* f245 = rec.find("245");
    if (f245 == nullptr) throw schema(ordinal, "missing 245");
    for (char code : {'a', 'b'}) {
      auto part = trim(f245->first(code));
      if (part.empty()) continue;
      if (!r.title.empty()) r.title += ' ';
      r.title += part;
    }
    if (auto c = trim(f245->first('c')); !c.empty()) r.statement = c;

    for (const auto& f : rec.fields) {
      if (f.tag == "260" || f.tag == "264") {
        if (!r.year) r.year = first_year(f.first('c'));
      } else if (f.tag == "490") {
        if (!r.series) {
          if (auto a = trim(f.first('a')); !a.empty()) r.series = a;
        }
      } else if (f.tag == "650") {
        auto heading = subdivided_heading(f);
        if (heading.empty()) {
          ++out.warnings.ignored_fields;
        } else {
          r.subjects.push_back(std::move(heading));
        }
      } else if (f.tag.size() == 3 && f.tag[0] == '6') {
        ++out.warnings.ignored_fields;
      }
    }
    out.warnings.duplicate_subjects += dedupe_headings(r.subjects);
    out.records.push_back(std::move(r));
  }
  return out;
}

Parsed<AuthorityRecord> parse_authority(std::string_view bytes) {
  Parsed<AuthorityRecord> out;
  std::unordered_set<std::string> ids;
  std::size_t ordinal = 0;
  for (const auto& rec : read_records(bytes)) {
    ++ordinal;
    AuthorityRecord r;
    const Field* f001 = rec.find("001");
    if (f001 == nullptr || trim(f001->data).empty()) throw schema(ordinal, "missing 001");
    r.id = trim(f001->data);
    check_id(ids, r.id, ordinal);
    const Field* f150 = rec.find("150");
    if (f150 == nullptr) throw schema(ordinal, "missing 150");
    r.heading = subdivided_heading(*f150);
    if (r.heading.empty()) throw schema(ordinal, "150 has no subfield a");

    for (const auto& f : rec.fields) {
      if (f.tag != "550") continue;
      bool is_broader = false;
      for (const auto& sf : f.subfields) {
        if (sf.code == 'w' && sf.value.find('g') != std::string::npos) is_broader = true;
      }
      if (!is_broader) continue;
      auto heading = subdivided_heading(f);
      if (heading.empty()) {
        ++out.warnings.ignored_fields;
      } else {
        r.broader.push_back(std::move(heading));
      }
    }
    HeadingKey self(r.heading);
    out.warnings.duplicate_broader +=
        dedupe_headings(r.broader, &self, &out.warnings.self_broader);
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace lcsx::iso2709
