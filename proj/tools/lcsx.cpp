// SPDX-License-Identifier: Apache-2.0
//
// lcsx: build, inspect and query subject-browsing index bundles.
//
// Exit codes: 0 success, 1 domain error, 2 I/O or bundle error, 64 usage.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>

#include "lcsx/bundle.hpp"
#include "lcsx/error.hpp"
#include "lcsx/ingest.hpp"
#include "lcsx/iso2709.hpp"
#include "lcsx/service.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

int exit_code_for(lcsx::ErrorKind kind) {
  switch (kind) {
    case lcsx::ErrorKind::Io:
    case lcsx::ErrorKind::Bundle:
      return kExitIo;
    default:
      return kExitDomain;
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lcsx::Error(lcsx::ErrorKind::Io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = std::strtoll(epoch, nullptr, 10);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json warnings_json(const lcsx::ParseWarnings& w) {
  return {{"duplicate_subjects", w.duplicate_subjects},
          {"duplicate_broader", w.duplicate_broader},
          {"self_broader", w.self_broader},
          {"ignored_fields", w.ignored_fields}};
}

lcsx::IndexBundle open_bundle(const std::string& path) { return lcsx::IndexBundle::load(path); }

void print(const json& j) { std::cout << j.dump() << '\n'; }

struct BuildArgs {
  std::string bib;
  std::string auth;
  std::string out;
  bool marc = false;
  std::uint32_t threshold = 1;
  bool no_collapse = false;
};

int run_build(const BuildArgs& a) {
  const std::string bib_bytes = read_file(a.bib);
  const std::string auth_bytes = read_file(a.auth);

  lcsx::Parsed<lcsx::BibRecord> bibs;
  lcsx::Parsed<lcsx::AuthorityRecord> auths;
  if (a.marc) {
    bibs = lcsx::iso2709::parse_bib(bib_bytes);
    auths = lcsx::iso2709::parse_authority(auth_bytes);
  } else {
    std::istringstream bin(bib_bytes);
    std::istringstream ain(auth_bytes);
    bibs = lcsx::parse_bib_jsonl(bin);
    auths = lcsx::parse_auth_jsonl(ain);
  }
  const auto bib_warnings = bibs.warnings;
  const auto auth_warnings = auths.warnings;

  lcsx::PruneParams params{a.threshold, !a.no_collapse};
  auto bundle = lcsx::IndexBundle::build(std::move(auths.records), std::move(bibs.records), params);
  bundle.meta().sources = {{fs::path(a.bib).filename().string(), lcsx::sha256_hex(bib_bytes)},
                           {fs::path(a.auth).filename().string(), lcsx::sha256_hex(auth_bytes)}};
  bundle.meta().built_at = utc_now();
  bundle.save(a.out);

  json report = bundle.meta().report;
  report["digest"] = bundle.content_digest();
  report["records"] = bundle.records().size();
  report["authorities"] = bundle.authorities().size();
  report["warnings"] = {{"bib", warnings_json(bib_warnings)},
                        {"auth", warnings_json(auth_warnings)}};
  report["stats"] = lcsx::to_json(lcsx::tree_stats(bundle.graph()));
  report["out"] = a.out;
  print(report);
  return kExitOk;
}

struct SearchArgs {
  std::string bundle;
  std::string query;
  std::optional<lcsx::TopicId> topic;
  bool descendants = false;
  std::size_t top = 10;
  std::size_t offset = 0;
  std::string last_selected;
  bool full = false;
};

int run_search(const SearchArgs& a) {
  auto bundle = open_bundle(a.bundle);
  lcsx::service::SearchParams p;
  p.query = a.query;
  p.topic = a.topic;
  p.descendants = a.descendants;
  p.limit = std::min(a.top, lcsx::service::kMaxLimit);
  p.offset = a.offset;
  if (!a.last_selected.empty()) p.last_selected = lcsx::service::parse_path(a.last_selected);
  auto body = lcsx::service::search_body(bundle, p);
  if (a.full) {
    print(body);
  } else {
    for (const auto& r : body["results"]) print(r);
  }
  return kExitOk;
}

int run_serve(const std::string& bundle_path, const std::string& host, int port,
              const std::string& cors) {
  std::shared_ptr<const lcsx::IndexBundle> bundle;
  if (!bundle_path.empty()) {
    bundle = std::make_shared<const lcsx::IndexBundle>(open_bundle(bundle_path));
  } else {
    std::cerr << "lcsx: no bundle given; every endpoint will answer 503\n";
  }
  lcsx::service::Service service(bundle);
  lcsx::service::HttpServer server(service, cors);
  const int bound = server.bind(host, port);
  if (bound < 0) throw lcsx::Error(lcsx::ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  std::cerr << "lcsx: listening on http://" << host << ":" << bound << "\n";
  server.listen();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subject-hierarchy browsing and keyword search over library collections"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build an index bundle from bib + authority records");
  build_cmd->add_option("--bib", build.bib, "Bibliographic records (JSONL, or ISO 2709 with --marc)")
      ->required();
  build_cmd->add_option("--auth", build.auth, "Authority records (JSONL, or ISO 2709 with --marc)")
      ->required();
  build_cmd->add_flag("--marc", build.marc, "Inputs are ISO 2709 (MARC21, UTF-8)");
  build_cmd->add_option("--out", build.out, "Bundle file to write")->required();
  build_cmd->add_option("--prune-threshold", build.threshold, "Minimum records under a topic")
      ->check(CLI::Range(1u, std::numeric_limits<std::uint32_t>::max()));
  build_cmd->add_flag("--no-collapse", build.no_collapse, "Keep single-child record-less topics");

  std::string serve_bundle;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  std::string serve_cors;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API");
  serve_cmd->add_option("--bundle", serve_bundle, "Index bundle")->envname("LCSX_BUNDLE");
  serve_cmd->add_option("--port", serve_port, "TCP port")
      ->envname("LCSX_PORT")
      ->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", serve_host, "Listen address");
  serve_cmd->add_option("--cors-origin", serve_cors, "Allowed browser origin")
      ->envname("LCSX_CORS_ORIGIN");

  SearchArgs search;
  auto* search_cmd = app.add_subcommand("search", "Ranked keyword search, one JSON result per line");
  search_cmd->add_option("bundle", search.bundle, "Index bundle")->required();
  search_cmd->add_option("query", search.query, "Query text");
  search_cmd->add_option("--topic", search.topic, "Restrict to records under this topic id");
  search_cmd->add_flag("--descendants", search.descendants, "Include records of descendant topics");
  search_cmd->add_option("--top", search.top, "Page size (capped at 100)")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  search_cmd->add_option("--offset", search.offset, "Page offset");
  search_cmd->add_option("--last-selected", search.last_selected,
                         "Anchor path for promising branches, e.g. 0,5,12");
  search_cmd->add_flag("--full", search.full, "Print the whole response (total, promising)");

  std::string stats_bundle;
  auto* stats_cmd = app.add_subcommand("stats", "Tree statistics of a bundle");
  stats_cmd->add_option("bundle", stats_bundle, "Index bundle")->required();

  std::string locate_bundle;
  std::uint64_t locate_topic = 0;
  std::string locate_anchor;
  auto* locate_cmd = app.add_subcommand("locate", "Nearest copy of a topic in the unfolded tree");
  locate_cmd->add_option("bundle", locate_bundle, "Index bundle")->required();
  locate_cmd->add_option("topic", locate_topic, "Topic id")->required();
  locate_cmd->add_option("--anchor", locate_anchor, "Anchor path, e.g. 0,5");

  std::string children_bundle;
  std::string children_path = "0";
  auto* children_cmd = app.add_subcommand("children", "Children of a tree path");
  children_cmd->add_option("bundle", children_bundle, "Index bundle")->required();
  children_cmd->add_option("--path", children_path, "Tree path, e.g. 0,5");

  std::string record_bundle;
  std::string record_id;
  auto* record_cmd = app.add_subcommand("record", "One bibliographic record with its topics");
  record_cmd->add_option("bundle", record_bundle, "Index bundle")->required();
  record_cmd->add_option("id", record_id, "Record id")->required();

  std::string export_bundle;
  std::string export_bib;
  std::string export_auth;
  auto* export_cmd = app.add_subcommand("export", "Write the bundle's records as canonical JSONL");
  export_cmd->add_option("bundle", export_bundle, "Index bundle")->required();
  export_cmd->add_option("--bib", export_bib, "Output file for bibliographic records")->required();
  export_cmd->add_option("--auth", export_auth, "Output file for authority records")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build_cmd) return run_build(build);
    if (*serve_cmd) return run_serve(serve_bundle, serve_host, serve_port, serve_cors);
    if (*search_cmd) return run_search(search);
    if (*stats_cmd) {
      print(lcsx::service::stats_body(open_bundle(stats_bundle)));
    } else if (*locate_cmd) {
      auto bundle = open_bundle(locate_bundle);
      std::optional<lcsx::TreePath> anchor;
      if (!locate_anchor.empty()) anchor = lcsx::service::parse_path(locate_anchor);
      if (locate_topic > std::numeric_limits<lcsx::TopicId>::max()) {
        throw lcsx::Error(lcsx::ErrorKind::NotFound, "unknown topic " + std::to_string(locate_topic));
      }
      print(lcsx::service::locate_body(bundle, static_cast<lcsx::TopicId>(locate_topic), anchor));
    } else if (*children_cmd) {
      auto bundle = open_bundle(children_bundle);
      print(lcsx::service::children_body(bundle, lcsx::service::parse_path(children_path)));
    } else if (*record_cmd) {
      print(lcsx::service::record_body(open_bundle(record_bundle), record_id));
    } else if (*export_cmd) {
      auto bundle = open_bundle(export_bundle);
      std::ofstream bib(export_bib, std::ios::binary | std::ios::trunc);
      std::ofstream auth(export_auth, std::ios::binary | std::ios::trunc);
      if (!bib || !auth) throw lcsx::Error(lcsx::ErrorKind::Io, "cannot open export files");
      lcsx::write_bib_jsonl(bib, bundle.records());
      lcsx::write_auth_jsonl(auth, bundle.authorities());
      if (!bib.flush() || !auth.flush()) {
        throw lcsx::Error(lcsx::ErrorKind::Io, "failed writing export files");
      }
      print({{"bib", export_bib},
             {"auth", export_auth},
             {"records", bundle.records().size()},
             {"authorities", bundle.authorities().size()}});
    }
    return kExitOk;
  } catch (const lcsx::Error& e) {
    std::cerr << lcsx::service::to_api_error(e).body().dump() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "lcsx: " << e.what() << '\n';
    return kExitIo;
  }
}
