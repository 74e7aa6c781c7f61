// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lcsx/ingest.hpp"

namespace lcsx::iso2709 {

inline constexpr char kFieldTerminator = '\x1E';
inline constexpr char kSubfieldDelimiter = '\x1F';
inline constexpr char kRecordTerminator = '\x1D';

struct Subfield {
  char code;
  std::string value;
};

struct Field {
  std::string tag;
  std::string data;  // control fields (00X) only
  char indicator1 = ' ';
  char indicator2 = ' ';
  std::vector<Subfield> subfields;

  bool is_control() const { return tag.size() == 3 && tag[0] == '0' && tag[1] == '0'; }
  // First value of the given subfield code, or empty.
  std::string_view first(char code) const;
};

struct Record {
  std::string leader;
  std::vector<Field> fields;
  std::size_t offset = 0;  // byte offset of the record in the input

  const Field* find(std::string_view tag) const;
};

/// Splits `bytes` into framed records. Throws Error(MalformedRecord) with the
/// byte offset of the problem, or Error(UnsupportedEncoding) when the leader
/// does not declare UTF-8 (position 9 = 'a').
std::vector<Record> read_records(std::string_view bytes);

Parsed<BibRecord> parse_bib(std::string_view bytes);
Parsed<AuthorityRecord> parse_authority(std::string_view bytes);

}  // namespace lcsx::iso2709
