// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lcsx/hierarchy.hpp"
#include "lcsx/ingest.hpp"
#include "lcsx/search.hpp"

namespace lcsx {

std::string sha256_hex(std::string_view bytes);

struct BuildMeta {
  std::vector<std::pair<std::string, std::string>> sources;  // (file name, sha256)
  std::string built_at;                                      // UTC, ISO 8601
  nlohmann::json report = nlohmann::json::object();
};

/// Everything the service and CLI need, in one file:
///
///   "LCSX1" | u32 version | u64 n | n bytes content | u64 m | m bytes meta
///
/// Integers are little-endian; both sections are CBOR. The content section is
/// canonical (sorted keys, records in id order), so it is a function of the
/// inputs and the build parameters alone; its SHA-256 is the bundle digest.
/// The meta section carries provenance (source digests, build time, reports)
/// and is not part of the digest.
class IndexBundle {
 public:
  static constexpr std::string_view kMagic = "LCSX1";
  static constexpr std::uint32_t kFormatVersion = 1;

  IndexBundle() = default;  // empty collection

  /// Full pipeline: graph construction, cycle breaking, pruning, indexing.
  static IndexBundle build(std::vector<AuthorityRecord> auths, std::vector<BibRecord> bibs,
                           const PruneParams& params, Bm25Config bm25 = {});

  const std::vector<BibRecord>& records() const noexcept { return records_; }
  /// Authority records that contributed a topic to the graph, in id order.
  const std::vector<AuthorityRecord>& authorities() const noexcept { return authorities_; }
  const TopicGraph& graph() const noexcept { return graph_; }
  const Index& index() const noexcept { return index_; }
  const PruneParams& prune_params() const noexcept { return prune_; }
  const BuildMeta& meta() const noexcept { return meta_; }
  BuildMeta& meta() noexcept { return meta_; }

  std::string serialize() const;
  /// Throws Error(Bundle) on bad magic, unknown version or corrupt payload.
  static IndexBundle deserialize(std::string_view bytes);

  void save(const std::filesystem::path& path) const;
  /// Throws Error(Io) when unreadable, Error(Bundle) when invalid.
  static IndexBundle load(const std::filesystem::path& path);

  std::string content_digest() const;

 private:
  nlohmann::json content_json() const;

  std::vector<BibRecord> records_;
  std::vector<AuthorityRecord> authorities_;
  TopicGraph graph_;
  Index index_;
  PruneParams prune_;
  BuildMeta meta_;
};

nlohmann::json to_json(const BuildReport& report);
nlohmann::json to_json(const PruneReport& report);
nlohmann::json to_json(const TreeStats& stats);

}  // namespace lcsx
