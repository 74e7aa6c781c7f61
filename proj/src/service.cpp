// SPDX-License-Identifier: Apache-2.0
#include "lcsx/service.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "lcsx/coordination.hpp"
#include "lcsx/search.hpp"

namespace lcsx::service {

using nlohmann::json;

json ApiError::body() const {
  return {{"error", {{"status", status}, {"code", code}, {"message", message}}}};
}

ApiError to_api_error(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::EmptyQuery: return {400, "EMPTY_QUERY", e.what()};
    case ErrorKind::NotFound: return {404, "NOT_FOUND", e.what()};
    case ErrorKind::InvalidPath: return {400, "INVALID_PATH", e.what()};
    case ErrorKind::Bundle: return {503, "BAD_REQUEST", e.what()};
    case ErrorKind::Io: return {500, "BAD_REQUEST", e.what()};
    default: return {400, "BAD_REQUEST", e.what()};
  }
}

namespace {

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

TopicId parse_topic_param(std::string_view s) {
  auto v = parse_uint(s);
  if (!v || *v > std::numeric_limits<TopicId>::max()) {
    throw Error(ErrorKind::BadRequest, "topic must be a non-negative integer id");
  }
  return static_cast<TopicId>(*v);
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::map<std::string, std::string> parse_query_string(std::string_view qs) {
  std::map<std::string, std::string> out;
  while (!qs.empty()) {
    auto amp = qs.find('&');
    auto pair = qs.substr(0, amp);
    if (!pair.empty()) {
      auto eq = pair.find('=');
      auto key = percent_decode(pair.substr(0, eq), true);
      auto value = eq == std::string_view::npos ? std::string()
                                                : percent_decode(pair.substr(eq + 1), true);
      out.emplace(std::move(key), std::move(value));
    }
    if (amp == std::string_view::npos) break;
    qs.remove_prefix(amp + 1);
  }
  return out;
}

json path_json(const TreePath& p) { return json(p); }

}  // namespace

std::string percent_decode(std::string_view text, bool plus_is_space) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '%' && i + 2 < text.size()) {
      int hi = hex_value(text[i + 1]);
      int lo = hex_value(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += (plus_is_space && c == '+') ? ' ' : c;
  }
  return out;
}

TreePath parse_path(std::string_view text) {
  TreePath out;
  std::size_t step = 0;
  while (true) {
    auto comma = text.find(',');
    auto part = text.substr(0, comma);
    auto v = parse_uint(part);
    if (!v || *v > std::numeric_limits<TopicId>::max()) {
      throw Error(ErrorKind::InvalidPath,
                  "step " + std::to_string(step) + ": '" + std::string(part) +
                      "' is not a topic id",
                  step);
    }
    out.push_back(static_cast<TopicId>(*v));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    ++step;
  }
  return out;
}

SearchParams parse_search_body(std::string_view body) {
  json j;
  try {
    j = body.empty() ? json::object() : json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::BadRequest, std::string("request body is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::BadRequest, "request body must be a JSON object");

  auto bad = [](const std::string& what) { return Error(ErrorKind::BadRequest, what); };
  auto uint_field = [&](const char* name) -> std::optional<std::uint64_t> {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
      throw bad(std::string("'") + name + "' must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
  };

  SearchParams p;
  if (auto it = j.find("query"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw bad("'query' must be a string");
    p.query = it->get<std::string>();
  }
  if (auto t = uint_field("topic")) {
    if (*t > std::numeric_limits<TopicId>::max()) {
      throw Error(ErrorKind::NotFound, "unknown topic " + std::to_string(*t));
    }
    p.topic = static_cast<TopicId>(*t);
  }
  if (auto it = j.find("descendants"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw bad("'descendants' must be a boolean");
    p.descendants = it->get<bool>();
  }
  if (auto limit = uint_field("limit")) {
    if (*limit < 1) throw bad("'limit' must be at least 1");
    p.limit = static_cast<std::size_t>(std::min<std::uint64_t>(*limit, kMaxLimit));
  }
  if (auto offset = uint_field("offset")) p.offset = static_cast<std::size_t>(*offset);
  if (auto it = j.find("last_selected"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorKind::InvalidPath, "'last_selected' must be an id list");
    TreePath path;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& v = (*it)[i];
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
          v.get<std::uint64_t>() > std::numeric_limits<TopicId>::max()) {
        throw Error(ErrorKind::InvalidPath, "step " + std::to_string(i) + ": not a topic id", i);
      }
      path.push_back(v.get<TopicId>());
    }
    p.last_selected = std::move(path);
  }
  return p;
}

double round_score(double score) { return std::round(score * 1e6) / 1e6; }

json stats_body(const IndexBundle& bundle) {
  auto s = tree_stats(bundle.graph());
  json body = to_json(s);
  body["records"] = bundle.records().size();
  body["prune"] = {{"threshold", bundle.prune_params().threshold},
                   {"collapse_chains", bundle.prune_params().collapse_chains}};
  return body;
}

json children_body(const IndexBundle& bundle, const TreePath& path) {
  const auto& g = bundle.graph();
  json children = json::array();
  for (const auto& c : children_of(g, path)) {
    children.push_back({{"id", c.id},
                        {"heading", c.heading},
                        {"direct_count", c.direct_count},
                        {"subtree_count", c.subtree_count},
                        {"has_children", c.has_children},
                        {"copy_count", copy_count(g, c.id)}});
  }
  return {{"path", path_json(path)}, {"children", std::move(children)}};
}

json result_json(const RankedResult& r) {
  json topics = json::array();
  for (const auto& t : r.assigned_topics) topics.push_back({{"id", t.id}, {"heading", t.heading}});
  json j = {{"id", r.id}, {"score", round_score(r.score)}, {"title", r.title},
            {"assigned_topics", std::move(topics)}};
  if (r.statement) j["statement"] = *r.statement;
  if (r.year) j["year"] = *r.year;
  if (r.series) j["series"] = *r.series;
  return j;
}

json search_body(const IndexBundle& bundle, const SearchParams& params) {
  const auto& g = bundle.graph();
  Query q = make_query(params.query);
  q.topic_filter = params.topic;
  q.descendants = params.descendants;
  q.limit = params.limit;
  q.offset = params.offset;
  if (params.last_selected) validate_path(g, *params.last_selected);

  auto ranking = rank(bundle.index(), g, q);
  auto pg = page(g, bundle.records(), ranking, q.offset, q.limit);

  SessionState session;
  session.last_selected = params.last_selected;
  std::vector<RecordIndex> ranked;
  for (std::size_t i = 0; i < ranking.size() && i < kPromisingWindow; ++i) {
    ranked.push_back(ranking[i].record);
  }
  json promising = json::array();
  for (const auto& b : promising_branches(ranked, g, session)) {
    promising.push_back({{"topic", b.topic},
                         {"heading", g.heading(b.topic)},
                         {"path", path_json(b.path)},
                         {"support", b.support},
                         {"copy_count", copy_count(g, b.topic)}});
  }
  json results = json::array();
  for (const auto& r : pg.results) results.push_back(result_json(r));
  return {{"total", pg.total}, {"results", std::move(results)}, {"promising", std::move(promising)}};
}

json locate_body(const IndexBundle& bundle, TopicId topic, const std::optional<TreePath>& anchor) {
  const auto& g = bundle.graph();
  std::optional<std::span<const TopicId>> a;
  if (anchor) a = std::span<const TopicId>(*anchor);
  auto path = nearest_copy(g, topic, a);
  return {{"topic", topic},
          {"heading", g.heading(topic)},
          {"path", path_json(path)},
          {"copy_count", copy_count(g, topic)}};
}

json record_body(const IndexBundle& bundle, std::string_view id) {
  const auto& g = bundle.graph();
  auto r = g.find_record(id);
  if (!r) throw Error(ErrorKind::NotFound, "unknown record '" + std::string(id) + "'");
  json j = to_json(bundle.records()[*r]);
  json topics = json::array();
  for (TopicId t : g.record_topics(*r)) topics.push_back({{"id", t}, {"heading", g.heading(t)}});
  j["topics"] = std::move(topics);
  return j;
}

Response Service::handle(std::string_view method, std::string_view target,
                         std::string_view body) const {
  auto fail = [](const ApiError& e) { return Response{e.status, e.body().dump()}; };
  auto ok = [](const json& j) { return Response{200, j.dump()}; };

  auto qpos = target.find('?');
  std::string_view path = target.substr(0, qpos);
  auto params = parse_query_string(qpos == std::string_view::npos ? std::string_view()
                                                                  : target.substr(qpos + 1));
  constexpr std::string_view kRecordPrefix = "/api/record/";

  const bool known = path == "/api/stats" || path == "/api/tree/children" ||
                     path == "/api/search" || path == "/api/locate" ||
                     (path.size() > kRecordPrefix.size() && path.starts_with(kRecordPrefix));
  if (!known) return fail({404, "NOT_FOUND", "no such endpoint: " + std::string(path)});
  const std::string_view want = path == "/api/search" ? "POST" : "GET";
  if (method != want) {
    return fail({405, "BAD_REQUEST", std::string(path) + " expects " + std::string(want)});
  }
  if (!bundle_) return fail({503, "BAD_REQUEST", "no index bundle is loaded"});
  const auto& b = *bundle_;

  try {
    if (path == "/api/stats") return ok(stats_body(b));
    if (path == "/api/tree/children") {
      auto it = params.find("path");
      return ok(children_body(b, parse_path(it == params.end() ? "0" : it->second)));
    }
    if (path == "/api/search") return ok(search_body(b, parse_search_body(body)));
    if (path == "/api/locate") {
      auto it = params.find("topic");
      if (it == params.end()) throw Error(ErrorKind::BadRequest, "missing 'topic' parameter");
      std::optional<TreePath> anchor;
      if (auto a = params.find("anchor"); a != params.end() && !a->second.empty()) {
        anchor = parse_path(a->second);
      }
      return ok(locate_body(b, parse_topic_param(it->second), anchor));
    }
    return ok(record_body(b, percent_decode(path.substr(kRecordPrefix.size()))));
  } catch (const Error& e) {
    return fail(to_api_error(e));
  } catch (const std::exception& e) {
    return fail({500, "BAD_REQUEST", e.what()});
  }
}

}  // namespace lcsx::service
