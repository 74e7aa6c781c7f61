// SPDX-License-Identifier: Apache-2.0
// The bundled science collection, built in memory.
#pragma once

#include <sstream>

#include "lcsx/bundle.hpp"
#include "support.hpp"

namespace testsupport {

inline std::vector<lcsx::BibRecord> fixture_bibs() {
  std::istringstream in(read_file(fixture_path("sci.jsonl")));
  return lcsx::parse_bib_jsonl(in).records;
}

inline std::vector<lcsx::AuthorityRecord> fixture_auths() {
  std::istringstream in(read_file(fixture_path("sci.auth.jsonl")));
  return lcsx::parse_auth_jsonl(in).records;
}

inline lcsx::IndexBundle fixture_bundle(lcsx::PruneParams params = {}) {
  return lcsx::IndexBundle::build(fixture_auths(), fixture_bibs(), params);
}

}  // namespace testsupport
