// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lcsx/bundle.hpp"
#include "lcsx/error.hpp"
#include "lcsx/hierarchy.hpp"

namespace lcsx::service {

// Wire form of an engine error.
struct ApiError {
  int status;
  std::string code;  // EMPTY_QUERY | NOT_FOUND | INVALID_PATH | BAD_REQUEST
  std::string message;

  nlohmann::json body() const;
};

ApiError to_api_error(const Error& e);

/// "0,5,12" -> {0, 5, 12}. Throws Error(InvalidPath) for anything that is not
/// a comma-separated list of decimal ids (empty steps included).
TreePath parse_path(std::string_view text);

std::string percent_decode(std::string_view text, bool plus_is_space = false);

struct SearchParams {
  std::string query;
  std::optional<TopicId> topic;
  bool descendants = false;
  std::size_t limit = 10;
  std::size_t offset = 0;
  std::optional<TreePath> last_selected;
};

inline constexpr std::size_t kMaxLimit = 100;

/// Decodes a POST /api/search body. Limits above 100 are capped. Throws
/// Error(BadRequest) for malformed JSON or mistyped fields.
SearchParams parse_search_body(std::string_view body);

// Response bodies. The CLI prints exactly these, so both front ends agree.
nlohmann::json stats_body(const IndexBundle& bundle);
nlohmann::json children_body(const IndexBundle& bundle, const TreePath& path);
nlohmann::json search_body(const IndexBundle& bundle, const SearchParams& params);
nlohmann::json locate_body(const IndexBundle& bundle, TopicId topic,
                           const std::optional<TreePath>& anchor);
nlohmann::json record_body(const IndexBundle& bundle, std::string_view id);
nlohmann::json result_json(const RankedResult& result);

/// Scores are reported rounded to 6 decimal places.
double round_score(double score);

struct Response {
  int status = 200;
  std::string body;
};

/// Stateless router over an immutable bundle; safe to call from many threads.
/// A null bundle answers every endpoint with 503.
class Service {
 public:
  explicit Service(std::shared_ptr<const IndexBundle> bundle) : bundle_(std::move(bundle)) {}

  /// `target` is the raw request target: path plus optional query string.
  Response handle(std::string_view method, std::string_view target, std::string_view body) const;

 private:
  std::shared_ptr<const IndexBundle> bundle_;
};

/// HTTP front end (cpp-httplib). Adds CORS headers when an origin is set.
class HttpServer {
 public:
  HttpServer(const Service& service, std::string cors_origin = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Blocks.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lcsx::service
