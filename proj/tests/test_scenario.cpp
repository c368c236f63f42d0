#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "svsp/scenario.hpp"

using namespace svsp;

namespace {

std::shared_ptr<const SpecDb> clean() {
  static auto db = testsupport::load_db(testsupport::clean_fixture());
  return db;
}

const char* kOpen =
    "call \"OPEN GKS\" with \"error file\" = \"e\", \"amount of memory\" = 64\n"
    "call \"OPEN WORKSTATION\" with \"workstation identifier\" = \"ws\", \"connection identifier\" = \"c\", "
    "\"workstation type\" = 2\n";

}  // namespace

TEST_CASE("statements parse into their kinds") {
  auto st = parse_statement("call \"OPEN GKS\" with \"error file\" = \"x\", \"amount of memory\" = 3", 1);
  REQUIRE(st);
  const auto& c = std::get<CallStmt>(st->body);
  CHECK(c.function == "OPEN GKS");
  REQUIRE(c.args.size() == 2);
  CHECK(c.args[1].second == Literal::of_int(3));

  CHECK(std::get<ExpectStmt>(parse_statement("expect error 7", 1)->body).error_number == 7);
  CHECK(std::get<ExpectStmt>(parse_statement("expect X104", 1)->body).code == ExceptionCode::X104);
  CHECK(std::get<ExpectStmt>(parse_statement("expect completed", 1)->body).kind == ExpectStmt::Kind::Completed);
  CHECK(std::get<AssertStateStmt>(parse_statement("assert state WSOP", 1)->body).state == "WSOP");
  CHECK(std::get<AssertIndicatorStmt>(parse_statement("assert \"x\" unvalued", 1)->body).predicate ==
        IndicatorPredicate::Unvalued);
  CHECK(std::get<GroupStmt>(parse_statement("group \"G\"", 1)->body).group == "G");
  CHECK_FALSE(parse_statement("   # just a comment", 1));
  CHECK_FALSE(parse_statement("", 1));
}

TEST_CASE("malformed statements are script errors") {
  CHECK_THROWS_AS(parse_statement("call OPEN", 3), ScriptError);
  CHECK_THROWS_AS(parse_statement("expect maybe", 3), ScriptError);
  CHECK_THROWS_AS(parse_statement("assert \"x\" happy", 3), ScriptError);
  CHECK_THROWS_AS(parse_statement("dance", 3), ScriptError);
  CHECK_THROWS_AS(parse_statement("expect completed now", 3), ScriptError);
  CHECK_THROWS_AS(parse_script("expect completed\ncall \"X\"\n"), ScriptError);
  try {
    parse_statement("expect maybe", 9);
  } catch (const ScriptError& e) {
    CHECK(e.line == 9);
  }
}

TEST_CASE("unknown names are rejected with the statement index") {
  auto script = parse_script("call \"OPEN GKS\"\ncall \"NOPE\"\n");
  try {
    validate_script(*clean(), script);
    FAIL("expected a ScriptError");
  } catch (const ScriptError& e) {
    REQUIRE(e.statement);
    CHECK(*e.statement == 1);
  }
  CHECK_THROWS_AS(run_script(clean(), parse_script("call \"OPEN GKS\" with \"operating state\" = GKOP\n")),
                  ScriptError);
  CHECK_THROWS_AS(run_script(clean(), parse_script("call \"OPEN GKS\"\nassert state NOWHERE\n")), ScriptError);
  CHECK_THROWS_AS(run_script(clean(), parse_script("group \"NOGROUP\"\n")), ScriptError);
}

TEST_CASE("the emergency close group yields its five members in order") {
  std::string text = std::string(kOpen) +
                     "call \"ACTIVATE WORKSTATION\"\n"
                     "call \"CREATE SEGMENT\" with \"segment name\" = \"s\"\n"
                     "group \"EMERGENCY CLOSE GKS\"\n"
                     "assert state GKCL\n";
  auto r = run_script(clean(), parse_script(text));
  REQUIRE(r.outcomes.size() == 9);
  std::vector<std::string> tail;
  for (std::size_t i = 4; i < r.outcomes.size(); ++i) {
    tail.push_back(r.outcomes[i].function);
    CHECK(r.outcomes[i].kind == OutcomeKind::Completed);
  }
  CHECK(tail == std::vector<std::string>{"CLOSE SEGMENT", "UPDATE WORKSTATION", "DEACTIVATE WORKSTATION",
                                         "CLOSE WORKSTATION", "CLOSE GKS"});
  CHECK(r.failures.empty());
  CHECK(scenario_exit_code(r) == 0);
}

TEST_CASE("group members keep running after a failing member") {
  auto r = run_script(clean(), parse_script(std::string(kOpen) + "group \"EMERGENCY CLOSE GKS\"\n"));
  REQUIRE(r.outcomes.size() == 7);
  CHECK(r.outcomes[2].kind == OutcomeKind::Exception);  // no open segment
  CHECK(r.outcomes[6].function == "CLOSE GKS");
  CHECK(r.final_snapshot.state == "GKCL");
}

TEST_CASE("expect binds to the most recent call") {
  auto pass = run_script(clean(), parse_script("call \"INQUIRE WORKSTATION STATE\" with \"workstation identifier\" "
                                               "= \"w\"\nexpect error 7\nassert \"error indicator\" valued\n"));
  CHECK(pass.failures.empty());
  CHECK(scenario_exit_code(pass) == 0);

  auto fail = run_script(clean(), parse_script("call \"CLOSE GKS\"\nexpect completed\n"));
  REQUIRE(fail.failures.size() == 1);
  CHECK(fail.failures[0].statement == 1);
  CHECK(fail.failures[0].line == 2);
}

TEST_CASE("exit status distinguishes unexpected exceptions from failed assertions") {
  auto unexpected = run_script(clean(), parse_script("call \"CLOSE GKS\"\n"));
  CHECK(unexpected.unexpected_exceptions == 1);
  CHECK(scenario_exit_code(unexpected) == 1);

  auto expected = run_script(clean(), parse_script("call \"CLOSE GKS\"\nexpect X101\n"));
  CHECK(expected.unexpected_exceptions == 0);
  CHECK(scenario_exit_code(expected) == 0);

  auto assertion = run_script(clean(), parse_script("call \"INQUIRE WORKSTATION STATE\" with \"workstation "
                                                    "identifier\" = \"w\"\nassert state WSOP\n"));
  CHECK(assertion.unexpected_exceptions == 0);
  CHECK(scenario_exit_code(assertion) == 3);
}

TEST_CASE("indicator assertions check the predicates") {
  std::string text = std::string(kOpen) +
                     "assert \"workstation type\" valued\n"
                     "assert \"connection identifier\" defined\n"
                     "assert \"connection identifier\" unvalued\n"
                     "assert \"control flag\" unallocated\n"
                     "assert \"control flag\" undefined\n"
                     "assert \"set of open workstations\" allocated\n";
  auto r = run_script(clean(), parse_script(text));
  CHECK(r.failures.empty());
  auto bad = run_script(clean(), parse_script(std::string(kOpen) + "assert \"control flag\" allocated\n"));
  CHECK(bad.failures.size() == 1);
}

TEST_CASE("every bundled script replays to structurally identical results") {
  for (const auto* name : {"scripts/open-inquire.scn", "scripts/state-walk.scn", "scripts/callability.scn"}) {
    INFO(name);
    auto path = testsupport::source_path(name);
    auto script = parse_script(read_file(path), path);
    auto a = run_script(clean(), script);
    auto b = run_script(clean(), script);
    CHECK(a == b);
    CHECK(scenario_exit_code(a) == 0);
  }
}

TEST_CASE("the state walk reaches every operating state") {
  auto path = testsupport::source_path("scripts/state-walk.scn");
  auto r = run_script(clean(), parse_script(read_file(path), path));
  std::vector<std::string> visited;
  for (const auto& o : r.outcomes)
    if (visited.empty() || visited.back() != o.state_after) visited.push_back(o.state_after);
  CHECK(visited == std::vector<std::string>{"GKOP", "WSOP", "WSAC", "SGOP", "WSAC", "WSOP", "GKOP", "GKCL"});
  CHECK(r.failures.empty());
}
