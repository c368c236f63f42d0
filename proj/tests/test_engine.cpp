#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"
#include "svsp/engine.hpp"

using namespace svsp;

namespace {

std::shared_ptr<const SpecDb> clean() {
  static auto db = testsupport::load_db(testsupport::clean_fixture());
  return db;
}

const Arguments kOpenGks = {{"error file", Literal::of_string("gks.err")},
                            {"amount of memory", Literal::of_int(65536)}};
const Arguments kOpenWs = {{"workstation identifier", Literal::of_string("ws1")},
                           {"connection identifier", Literal::of_string("tty0")},
                           {"workstation type", Literal::of_int(3)}};
const Arguments kWsId = {{"workstation identifier", Literal::of_string("ws1")}};

bool has_code(const CallOutcome& o, ExceptionCode c) {
  auto cs = o.codes();
  return std::find(cs.begin(), cs.end(), c) != cs.end();
}

}  // namespace

TEST_CASE("fresh sessions start from the init literals") {
  auto s = new_session(clean());
  CHECK(s.operating_state() == "GKCL");
  CHECK(s.level() == "L2");
  CHECK(s.indicator("regeneration flag") == IndicatorTriple{true, true, true, Literal::of_ident("PERFORM")});
  CHECK(s.indicator("error indicator") == IndicatorTriple{});
  CHECK(s.log().empty());
  CHECK_THROWS_AS(s.indicator("no such element"), LookupError);
}

TEST_CASE("sessions are refused while the specification has errors") {
  auto faulty = testsupport::load_db(testsupport::faulty_fixture());
  CHECK_THROWS_AS(new_session(faulty), SessionRefused);
  CHECK_THROWS_AS(new_session(clean(), "L7"), LookupError);
}

TEST_CASE("the Table 1 inquiry reports error 7 before GKS is open") {
  auto s = new_session(clean());
  auto o = apply_call(s, "INQUIRE WORKSTATION STATE", kWsId);
  CHECK(o.kind == OutcomeKind::SpecError);
  CHECK(o.error_number == 7);
  CHECK(s.indicator("error indicator") == IndicatorTriple{true, true, true, Literal::of_int(7)});
  REQUIRE_FALSE(o.displayed_effects.empty());
  CHECK(o.displayed_effects.back().find("implementation dependent") != std::string::npos);
}

TEST_CASE("the Table 1 inquiry completes once a workstation is open") {
  auto s = new_session(clean());
  REQUIRE(apply_call(s, "OPEN GKS", kOpenGks).kind == OutcomeKind::Completed);
  REQUIRE(apply_call(s, "OPEN WORKSTATION", kOpenWs).kind == OutcomeKind::Completed);
  auto o = apply_call(s, "INQUIRE WORKSTATION STATE");
  CHECK(o.kind == OutcomeKind::Completed);
  CHECK(s.indicator("error indicator") == IndicatorTriple{true, true, true, Literal::of_int(0)});
  CHECK(s.indicator("workstation state").defined);
}

TEST_CASE("OPEN GKS allocates and defines every member of the state list bundle") {
  auto s = new_session(clean());
  auto o = apply_call(s, "OPEN GKS", kOpenGks);
  REQUIRE(o.kind == OutcomeKind::Completed);
  CHECK(o.state_after == "GKOP");
  const auto* b = s.spec().find_bundle("GKS state list");
  REQUIRE(b);
  for (const auto& m : b->members) {
    INFO(m);
    CHECK(s.indicator(m).allocated);
    CHECK(s.indicator(m).defined);
  }
}

TEST_CASE("exceptions are accumulated and abort without mutation") {
  auto s = new_session(clean(), "L0");
  auto before = s.snapshot();
  auto o = apply_call(s, "CREATE SEGMENT");
  CHECK(o.kind == OutcomeKind::Exception);
  CHECK(has_code(o, ExceptionCode::X101));
  CHECK(has_code(o, ExceptionCode::X106));
  CHECK(o.deltas.empty());
  auto after = s.snapshot();
  CHECK(after.indicators == before.indicators);
  CHECK(after.log_length == before.log_length + 1);
}

TEST_CASE("missing inputs raise X102 and X103") {
  auto s = new_session(clean());
  auto o = apply_call(s, "OPEN GKS");
  CHECK(o.kind == OutcomeKind::Exception);
  CHECK(o.exceptions.size() == 2);
  CHECK(has_code(o, ExceptionCode::X102));

  auto db = testsupport::parse_db(R"(
states { A } initial A
data "s" : state init A
data "n" : integer
data "m" : integer
function "MAKE" { param out internal "n" effect init "n exists" { sets "n" { allocated } } }
function "USE" { param in internal "n" param out internal "m" effect test "t" { sets "m" { defined } } }
)");
  auto t = new_session(db);
  apply_call(t, "MAKE");
  auto u = apply_call(t, "USE");
  CHECK(u.kind == OutcomeKind::Exception);
  CHECK(has_code(u, ExceptionCode::X103));
}

TEST_CASE("tests on unknown values raise X104 and value mismatches X105") {
  auto db = testsupport::parse_db(R"(
states { A B } initial A
enum e { X Y }
data "s" : state init A
data "v" : enum e
data "w" : enum e init X
function "TEST V" { param in external "v" param out internal "s" effect test "t" { when "v" = X { sets "s" { value = B } } } }
function "NEED Y" { param in internal "w" effect test "t" { requires "w" { value = Y } } }
function "FLIP" { param in internal "s" effect test "t" { when "s" = A { } } }
)");
  auto s = new_session(db);
  auto o = apply_call(s, "NEED Y");
  CHECK(o.kind == OutcomeKind::Exception);
  CHECK(has_code(o, ExceptionCode::X105));
  auto ok = apply_call(s, "TEST V", {{"v", Literal::of_ident("X")}});
  CHECK(ok.kind == OutcomeKind::Completed);
  CHECK(s.operating_state() == "B");
  auto bad = apply_call(s, "TEST V", {{"v", Literal::of_ident("Q")}});
  CHECK(bad.kind == OutcomeKind::Exception);
  CHECK(has_code(bad, ExceptionCode::X105));
}

TEST_CASE("an unvalued when raises X104") {
  auto db = testsupport::parse_db(R"(
states { A } initial A
data "s" : state init A
data "n" : integer
data "m" : integer
function "SET N" { param out internal "n" effect init "t" { sets "n" { allocated defined } } }
function "CHECK N" { param in internal "n" param out internal "m" effect test "t" { when "n" = 1 { sets "m" { defined } } } }
)");
  auto s = new_session(db);
  apply_call(s, "SET N");
  auto o = apply_call(s, "CHECK N");
  CHECK(o.kind == OutcomeKind::Exception);
  CHECK(has_code(o, ExceptionCode::X104));
}

TEST_CASE("argument errors are reported by exception type") {
  auto s = new_session(clean());
  CHECK_THROWS_AS(apply_call(s, "NO SUCH FUNCTION"), LookupError);
  CHECK_THROWS_AS(apply_call(s, "OPEN GKS", {{"no such element", Literal::of_int(1)}}), LookupError);
  CHECK_THROWS_AS(apply_call(s, "OPEN GKS", {{"operating state", Literal::of_ident("GKOP")}}), ArgumentError);
  CHECK(s.log().empty());
}

TEST_CASE("out-of-range arguments raise X105") {
  auto s = new_session(clean());
  apply_call(s, "OPEN GKS", kOpenGks);
  Arguments args = kOpenWs;
  args[2].second = Literal::of_int(40);
  auto o = apply_call(s, "OPEN WORKSTATION", args);
  CHECK(o.kind == OutcomeKind::Exception);
  CHECK(has_code(o, ExceptionCode::X105));
  CHECK(s.operating_state() == "GKOP");
}

TEST_CASE("dry runs leave the session untouched") {
  auto s = new_session(clean());
  auto before = s.snapshot();
  auto a = dry_run(s, "OPEN GKS", kOpenGks);
  auto b = dry_run(s, "OPEN GKS", kOpenGks);
  CHECK(a == b);
  CHECK(a.kind == OutcomeKind::Completed);
  CHECK(s.snapshot() == before);
}

TEST_CASE("reset returns to the initial indicators") {
  auto s = new_session(clean());
  auto fresh = s.snapshot();
  apply_call(s, "OPEN GKS", kOpenGks);
  s.reset();
  CHECK(s.snapshot() == fresh);
}

TEST_CASE("callability reports state and level") {
  auto s = new_session(clean(), "L0");
  auto c = check_callability(s, "CLOSE SEGMENT");
  CHECK_FALSE(c.callable);
  CHECK(c.reasons.size() == 2);
  CHECK(c.current_state == "GKCL");
  CHECK(check_callability(s, "OPEN GKS").callable);
}

TEST_CASE("indicator triples render compactly") {
  CHECK(to_string(IndicatorTriple{}) == "- - -");
  CHECK(to_string(IndicatorTriple{true, true, true, Literal::of_ident("GKOP")}) == "A D V=GKOP");
  CHECK(to_string(IndicatorTriple{true, false, false, std::nullopt}) == "A - -");
}

TEST_CASE("random call sequences keep aborts atomic and indicators monotone") {
  auto db = clean();
  std::mt19937 rng(1987);
  std::vector<std::string> functions;
  for (const auto& f : db->functions()) functions.push_back(f.name);

  // Candidate values per external input: mostly admissible, some not.
  auto candidates = [&](const DataElementDef& e) -> std::vector<Literal> {
    using K = DataType::Kind;
    switch (e.dtype.kind) {
      case K::Integer:
        return {Literal::of_int(0), Literal::of_int(1), Literal::of_int(3), Literal::of_int(10),
                Literal::of_int(5000), Literal::of_int(-1), Literal::of_ident("X")};
      case K::Enum: {
        std::vector<Literal> v;
        for (const auto& x : db->find_enum(e.dtype.enum_name)->values) v.push_back(Literal::of_ident(x));
        v.push_back(Literal::of_ident("BOGUS"));
        return v;
      }
      default:
        return {Literal::of_string("a"), Literal::of_string("b")};
    }
  };

  auto session = new_session(db);
  std::size_t calls = 0, exceptions = 0, atomicity_violations = 0, monotonicity_violations = 0, malformed = 0;
  for (int i = 0; i < 1500; ++i) {
    if (rng() % 200 == 0) session.reset();
    const auto& f = *db->find_function(functions[rng() % functions.size()]);
    Arguments args;
    for (const auto& p : f.params) {
      if (p.direction != Direction::In || p.locality != Locality::External || rng() % 4 == 0) continue;
      auto vals = candidates(*db->find_element(p.element));
      args.emplace_back(p.element, vals[rng() % vals.size()]);
    }
    auto before = session.snapshot();
    auto out = apply_call(session, f.name, args);
    auto after = session.snapshot();
    ++calls;
    if (after.log_length != before.log_length + 1) ++atomicity_violations;
    if (out.kind == OutcomeKind::Exception) {
      ++exceptions;
      if (after.indicators != before.indicators) ++atomicity_violations;
      if (!out.deltas.empty()) ++atomicity_violations;
    } else {
      for (std::size_t k = 0; k < after.indicators.size(); ++k) {
        const auto& b = before.indicators[k].second;
        const auto& a = after.indicators[k].second;
        if ((b.allocated && !a.allocated) || (b.defined && !a.defined) || (b.valued && !a.valued))
          ++monotonicity_violations;
      }
    }
    for (const auto& [name, t] : after.indicators)
      if (!t.well_formed()) ++malformed;
  }
  CHECK(calls >= 1000);
  CHECK(exceptions > 0);
  CHECK(exceptions < calls);
  CHECK(atomicity_violations == 0);
  CHECK(monotonicity_violations == 0);
  CHECK(malformed == 0);
}

TEST_CASE("value admissibility follows type, restriction and domain") {
  auto db = clean();
  const auto& ws = *db->find_element("workstation type");
  CHECK(value_admissible(*db, ws, Literal::of_int(1)));
  CHECK_FALSE(value_admissible(*db, ws, Literal::of_int(11)));
  CHECK_FALSE(value_admissible(*db, ws, Literal::of_ident("X")));
  const auto& st = *db->find_element("operating state");
  CHECK(value_admissible(*db, st, Literal::of_ident("WSAC")));
  CHECK_FALSE(value_admissible(*db, st, Literal::of_ident("NOPE")));
}
