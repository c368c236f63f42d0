#include <catch_amalgamated.hpp>

#include <algorithm>
#include <regex>
#include <set>

#include "support.hpp"
#include "svsp/checker.hpp"
#include "svsp/report.hpp"

using namespace svsp;

namespace {

std::shared_ptr<const SpecDb> clean() {
  static auto db = testsupport::load_db(testsupport::clean_fixture());
  return db;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < s.size()) {
    auto nl = s.find('\n', start);
    out.push_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

// Functions whose source body mentions `element` as a parameter, found by
// scanning the fixture text rather than the parsed model.
std::set<std::string> functions_mentioning(const std::string& text, const std::string& element) {
  std::set<std::string> out;
  std::regex header(R"re(^function "([^"]+)")re");
  std::string current;
  for (const auto& line : lines_of(text)) {
    std::smatch m;
    if (std::regex_search(line, m, header)) current = m[1];
    if (line.find("param ") != std::string::npos && line.find("\"" + element + "\"") != std::string::npos)
      out.insert(current);
  }
  return out;
}

}  // namespace

TEST_CASE("empty diagnostics render as a bare summary") {
  CHECK(render_diagnostics({}, DiagFormat::Text) == "0 errors, 0 warnings\n");
  CHECK(render_diagnostics({}, DiagFormat::JsonLines).empty());
}

TEST_CASE("text diagnostics follow the fixed line format") {
  auto db = testsupport::load_db(testsupport::faulty_fixture());
  auto text = render_diagnostics(run_all_checks(*db), DiagFormat::Text);
  auto lines = lines_of(text);
  REQUIRE(lines.size() >= 2);
  CHECK(lines.back() == "4 errors, 2 warnings");
  std::regex shape(R"(^[EW]\d{3} (error|warning) [^:]+:\d+:\d+ "[^"]+" — .+$)");
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) CHECK(std::regex_match(lines[i], shape));
  CHECK(std::any_of(lines.begin(), lines.end(), [](const std::string& l) {
    return l.rfind("E005 error ", 0) == 0 && l.find("\"control flag\" — ") != std::string::npos;
  }));
  CHECK(text.find("[related: \"window\"]") != std::string::npos);
  CHECK(render_diagnostics(run_all_checks(*db), DiagFormat::Text) == text);
}

TEST_CASE("color decoration only when asked") {
  auto db = testsupport::load_db(testsupport::faulty_fixture());
  auto diags = run_all_checks(*db);
  CHECK(render_diagnostics(diags, DiagFormat::Text).find('\x1b') == std::string::npos);
  CHECK(render_diagnostics(diags, DiagFormat::Text, true).find('\x1b') != std::string::npos);
}

TEST_CASE("json lines keep key order and round-trip") {
  auto db = testsupport::load_db(testsupport::faulty_fixture());
  auto diags = run_all_checks(*db);
  auto out = render_diagnostics(diags, DiagFormat::JsonLines);
  auto lines = lines_of(out);
  REQUIRE(lines.size() == diags.size());
  const std::vector<std::string> keys = {"code", "severity", "file", "line", "col", "subject", "message", "related"};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto j = ordered_json::parse(lines[i]);
    std::vector<std::string> got;
    for (auto it = j.begin(); it != j.end(); ++it) got.push_back(it.key());
    CHECK(got == keys);
    auto back = diagnostic_from_json(nlohmann::json::parse(lines[i]));
    CHECK(back.code == diags[i].code);
    CHECK(back.severity == diags[i].severity);
    CHECK(back.location == diags[i].location);
    CHECK(back.subject == diags[i].subject);
    CHECK(back.message == diags[i].message);
    CHECK(back.related == diags[i].related);
  }
  CHECK(out.back() == '\n');
}

TEST_CASE("all five orderings are permutations of the declared functions") {
  auto db = clean();
  auto decl = function_listing(*db, ListingOrder::ByDeclaration);
  REQUIRE(decl.rows.size() == db->functions().size());
  for (std::size_t i = 0; i < decl.rows.size(); ++i) CHECK(decl.rows[i].name == db->functions()[i].name);
  auto key = [](const ListingRow& r) { return r.name; };
  std::vector<std::string> base;
  for (const auto& r : decl.rows) base.push_back(key(r));
  std::sort(base.begin(), base.end());
  for (auto o : {ListingOrder::ByName, ListingOrder::ByType, ListingOrder::ByLevel, ListingOrder::ByState}) {
    auto l = function_listing(*db, o);
    std::vector<std::string> names;
    for (const auto& r : l.rows) names.push_back(key(r));
    std::sort(names.begin(), names.end());
    CHECK(names == base);
  }
}

TEST_CASE("orderings honor their key with the name as tie-break") {
  auto db = clean();
  auto by_name = function_listing(*db, ListingOrder::ByName);
  CHECK(std::is_sorted(by_name.rows.begin(), by_name.rows.end(),
                       [](const auto& a, const auto& b) { return a.name < b.name; }));
  auto by_type = function_listing(*db, ListingOrder::ByType);
  CHECK(std::is_sorted(by_type.rows.begin(), by_type.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.type, a.name) < std::tie(b.type, b.name);
  }));
  auto by_level = function_listing(*db, ListingOrder::ByLevel);
  auto lvl = [&](const ListingRow& r) { return *db->level_index(r.level); };
  CHECK(std::is_sorted(by_level.rows.begin(), by_level.rows.end(), [&](const auto& a, const auto& b) {
    return std::make_pair(lvl(a), a.name) < std::make_pair(lvl(b), b.name);
  }));
}

TEST_CASE("the by-state listing groups functions under states in declaration order") {
  auto db = clean();
  auto listing = function_listing(*db, ListingOrder::ByState);
  // Brute force: for each state in order, the functions whose earliest valid
  // state it is, sorted by name.
  std::vector<std::string> expected;
  for (std::size_t s = 0; s < db->states().size(); ++s) {
    std::vector<std::string> bucket;
    for (const auto& f : db->functions()) {
      std::size_t first = db->states().size();
      for (std::size_t k = 0; k < db->states().size(); ++k)
        if (f.valid_states.empty() ||
            std::find(f.valid_states.begin(), f.valid_states.end(), db->states()[k]) != f.valid_states.end()) {
          first = k;
          break;
        }
      if (first == s) bucket.push_back(f.name);
    }
    std::sort(bucket.begin(), bucket.end());
    expected.insert(expected.end(), bucket.begin(), bucket.end());
  }
  std::vector<std::string> got;
  for (const auto& r : listing.rows) got.push_back(r.name);
  CHECK(got == expected);
  auto text = render_listing(*db, listing);
  CHECK(text.find("[GKCL]\n") < text.find("[GKOP]\n"));
}

TEST_CASE("listing orders parse from their CLI spellings") {
  for (auto s : {"name", "type", "level", "state", "decl"}) {
    auto o = listing_order_from(s);
    REQUIRE(o);
    CHECK(std::string(to_string(*o)) == s);
  }
  CHECK_FALSE(listing_order_from("size"));
}

TEST_CASE("the operating state cross reference lists every function that names it") {
  auto db = clean();
  auto x = cross_reference(*db, "operating state");
  std::set<std::string> got;
  for (const auto& u : x.uses) got.insert(u.function);
  CHECK(got == functions_mentioning(read_file(testsupport::clean_fixture()), "operating state"));
  CHECK(got.count("OPEN GKS"));
  CHECK(got.count("CLOSE SEGMENT"));
  CHECK(std::any_of(x.effects.begin(), x.effects.end(), [](const EffectTouch& e) {
    return e.function == "INQUIRE WORKSTATION STATE" && e.clause_kinds.front() == "when";
  }));
}

TEST_CASE("bundle members are cross referenced through the bundle") {
  auto db = clean();
  auto x = cross_reference(*db, "clip indicator");
  CHECK(x.bundles == std::vector<std::string>{"GKS state list"});
  bool via_bundle = false, direct = false;
  for (const auto& u : x.uses) {
    if (u.function == "OPEN GKS" && u.bundle == "GKS state list" && u.direction == Direction::Out) via_bundle = true;
    if (u.function == "POLYLINE" && u.bundle.empty()) direct = true;
  }
  CHECK(via_bundle);
  CHECK(direct);
}

TEST_CASE("an element with W011 has no uses") {
  auto db = testsupport::load_db(testsupport::faulty_fixture());
  auto x = cross_reference(*db, "window");
  CHECK(x.uses.empty());
  CHECK_THROWS_AS(cross_reference(*db, "window limits"), LookupError);
}

TEST_CASE("cross reference uses add up to the expanded parameter count") {
  for (const auto& path : {testsupport::clean_fixture(), testsupport::faulty_fixture()}) {
    auto db = testsupport::load_db(path);
    std::size_t uses = 0, params = 0;
    for (const auto& e : db->data_elements()) uses += cross_reference(*db, e.name).uses.size();
    for (const auto& f : db->functions())
      for (const auto& p : f.params)
        if (db->find_element(p.element)) ++params;
    CHECK(uses == params);
  }
}

TEST_CASE("outcome json carries the fixed field names") {
  auto s = new_session(clean());
  auto o = apply_call(s, "INQUIRE WORKSTATION STATE", {{"workstation identifier", Literal::of_string("w")}});
  auto j = outcome_to_json(o);
  CHECK(j["kind"] == "SPEC_ERROR");
  CHECK(j["number"] == 7);
  CHECK(j["state_after"] == "GKCL");
  CHECK(j["effects"].is_array());
  CHECK(j["deltas"].is_array());
  auto snap = snapshot_to_json(s.snapshot(), s.level());
  CHECK(snap["log_length"] == 1);
  CHECK(snap["indicators"][0]["element"] == "operating state");
  CHECK(snap["indicators"][0]["value"] == "GKCL");
}

TEST_CASE("scenario text shows effects, deltas and exceptions") {
  auto s = new_session(clean());
  auto o = apply_call(s, "CLOSE GKS");
  auto text = render_outcome(o, 1);
  CHECK(text.find("EXCEPTION") != std::string::npos);
  CHECK(text.find("X101") != std::string::npos);
  auto ok = apply_call(s, "INQUIRE WORKSTATION STATE", {{"workstation identifier", Literal::of_string("w")}});
  auto t2 = render_outcome(ok, 2);
  CHECK(t2.find("effect: If the inquired information is available") != std::string::npos);
  CHECK(t2.find("\"error indicator\": - - - -> A D V=7") != std::string::npos);
}
