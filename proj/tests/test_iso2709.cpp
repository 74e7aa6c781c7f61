// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "lcsx/error.hpp"
#include "lcsx/iso2709.hpp"
#include "support.hpp"

using namespace lcsx;
using nlohmann::json;

namespace {

template <class F>
Error capture(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected lcsx::Error");
  return Error(ErrorKind::Io, "unreachable");
}

// Minimal hand framing, independent of the reference writer.
std::string frame(const std::vector<std::pair<std::string, std::string>>& fields,
                  char encoding = 'a') {
  std::string directory, data;
  for (const auto& [tag, body] : fields) {
    char entry[13];
    std::snprintf(entry, sizeof entry, "%3s%04zu%05zu", tag.c_str(), body.size() + 1, data.size());
    directory += entry;
    data += body + '\x1E';
  }
  directory += '\x1E';
  const std::size_t base = 24 + directory.size();
  const std::size_t total = base + data.size() + 1;
  char leader[25];
  std::snprintf(leader, sizeof leader, "%05zunam %c22%05zu i 4500", total, encoding, base);
  return std::string(leader) + directory + data + '\x1D';
}

std::string sf(char code, const std::string& v) { return std::string("\x1F") + code + v; }

json as_json(const BibRecord& r) { return to_json(r); }
json as_json(const AuthorityRecord& r) { return to_json(r); }

template <class R>
void check_against(const std::vector<R>& got, const json& expected) {
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(i);
    CHECK(as_json(got[i]) == expected[i]);
  }
}

}  // namespace

TEST_CASE("reference-writer fixtures parse to their source field data") {
  for (const char* stem : {"mini", "random"}) {
    CAPTURE(stem);
    const auto expected = testsupport::read_json(std::string(stem) + ".expected.json");
    auto bib = iso2709::parse_bib(testsupport::read_file(testsupport::fixture_path(std::string(stem) + ".mrc")));
    auto auth = iso2709::parse_authority(
        testsupport::read_file(testsupport::fixture_path(std::string(stem) + "_auth.mrc")));
    check_against(bib.records, expected["bib"]);
    check_against(auth.records, expected["auth"]);
  }
}

TEST_CASE("mini fixture details") {
  auto bib = iso2709::parse_bib(testsupport::read_file(testsupport::fixture_path("mini.mrc")));
  REQUIRE(bib.records.size() == 5);
  CHECK(bib.records[0].title == "Finite elements");
  CHECK(bib.records[0].subjects == std::vector<std::string>{"Finite element method"});
  CHECK(bib.records[0].year == 1986);
  CHECK(bib.records[2].subjects[1] == "Finite element method--Data processing--Handbooks, manuals, etc.");
  CHECK(bib.warnings.ignored_fields == 1);  // the 651
  auto auth = iso2709::parse_authority(testsupport::read_file(testsupport::fixture_path("mini_auth.mrc")));
  CHECK(auth.records[0].heading == "Finite element method--Data processing");
  CHECK(auth.records[1].broader == std::vector<std::string>{"Numerical analysis"});
}

TEST_CASE("hand-framed record") {
  auto bytes = frame({{"001", "x1"},
                      {"245", "10" + sf('a', "Title :") + sf('b', "sub") + sf('c', "by me")},
                      {"264", " 1" + sf('c', "copyright 2001")},
                      {"490", "0 " + sf('a', "Series")},
                      {"650", " 0" + sf('a', "A") + sf('z', "Z") + sf('x', "X")}});
  auto p = iso2709::parse_bib(bytes + "\n" + bytes.substr(0, 0));
  REQUIRE(p.records.size() == 1);
  const auto& r = p.records[0];
  CHECK(r.id == "x1");
  CHECK(r.title == "Title : sub");
  CHECK(r.statement == "by me");
  CHECK(r.year == 2001);
  CHECK(r.series == "Series");
  CHECK(r.subjects == std::vector<std::string>{"A--Z--X"});
}

TEST_CASE("framing errors") {
  auto good = frame({{"001", "x1"}, {"245", "10" + sf('a', "T")}});

  auto longer = good;
  longer.replace(0, 5, "99999");
  auto e = capture([&] { iso2709::read_records(longer); });
  CHECK(e.kind() == ErrorKind::MalformedRecord);
  CHECK(e.location() == 0);

  auto second = good + good.substr(0, good.size() - 1);
  e = capture([&] { iso2709::read_records(second); });
  CHECK(e.kind() == ErrorKind::MalformedRecord);
  CHECK(e.location() == good.size());

  e = capture([&] { iso2709::read_records(good.substr(0, 10)); });
  CHECK(e.kind() == ErrorKind::MalformedRecord);

  auto no_term = good;
  no_term.back() = 'x';
  CHECK(capture([&] { iso2709::read_records(no_term); }).kind() == ErrorKind::MalformedRecord);

  auto bad_dir = good;
  bad_dir.replace(24 + 7, 5, "90000");  // first field offset beyond the data
  CHECK(capture([&] { iso2709::read_records(bad_dir); }).kind() == ErrorKind::MalformedRecord);

  CHECK(capture([&] { iso2709::read_records(frame({{"001", "x"}}, ' ')); }).kind() ==
        ErrorKind::UnsupportedEncoding);
  CHECK(iso2709::read_records("").empty());
}

TEST_CASE("schema errors carry the record ordinal") {
  auto ok = frame({{"001", "x1"}, {"245", "10" + sf('a', "T")}});
  auto no_id = frame({{"245", "10" + sf('a', "T")}});
  auto e = capture([&] { iso2709::parse_bib(ok + no_id); });
  CHECK(e.kind() == ErrorKind::Schema);
  CHECK(e.location() == 2);
  auto no_title = frame({{"001", "x2"}});
  CHECK(capture([&] { iso2709::parse_bib(no_title); }).kind() == ErrorKind::Schema);
  CHECK(capture([&] { iso2709::parse_authority(frame({{"001", "a"}})); }).kind() == ErrorKind::Schema);
  CHECK(capture([&] { iso2709::parse_bib(ok + ok); }).kind() == ErrorKind::DuplicateId);
}

TEST_CASE("authority 550 selection") {
  auto bytes = frame({{"001", "a1"},
                      {"150", "  " + sf('a', "Heading") + sf('x', "Sub")},
                      {"550", "  " + sf('w', "g") + sf('a', "Broad") + sf('v', "Form")},
                      {"550", "  " + sf('w', "h") + sf('a', "Narrow")},
                      {"550", "  " + sf('a', "Related")},
                      {"550", "  " + sf('w', "g") + sf('a', "heading") + sf('x', "sub")}});
  auto p = iso2709::parse_authority(bytes);
  REQUIRE(p.records.size() == 1);
  CHECK(p.records[0].heading == "Heading--Sub");
  CHECK(p.records[0].broader == std::vector<std::string>{"Broad--Form"});
  CHECK(p.warnings.self_broader == 1);
}
