#include "svsp/scenario.hpp"

#include <algorithm>
#include <sstream>

#include "svsp/lexer.hpp"

namespace svsp {

const char* to_string(IndicatorPredicate p) {
  switch (p) {
    case IndicatorPredicate::Allocated:
      return "allocated";
    case IndicatorPredicate::Unallocated:
      return "unallocated";
    case IndicatorPredicate::Defined:
      return "defined";
    case IndicatorPredicate::Undefined:
      return "undefined";
    case IndicatorPredicate::Valued:
      return "valued";
    case IndicatorPredicate::Unvalued:
      return "unvalued";
  }
  return "allocated";
}

namespace {

std::optional<IndicatorPredicate> predicate_from(std::string_view s) {
  for (auto p : {IndicatorPredicate::Allocated, IndicatorPredicate::Unallocated, IndicatorPredicate::Defined,
                 IndicatorPredicate::Undefined, IndicatorPredicate::Valued, IndicatorPredicate::Unvalued})
    if (s == to_string(p)) return p;
  return std::nullopt;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line) : toks_(std::move(toks)), line_(line) {}

  Statement statement() {
    Statement st;
    st.line = line_;
    const Token& head = cur();
    if (!head.is(Token::Kind::Ident)) fail("expected a statement keyword");
    std::string kw = take().text;
    if (kw == "call") {
      CallStmt c;
      c.function = string("function name");
      if (cur().is_word("with")) {
        take();
        for (;;) {
          std::string elem = string("data element name");
          if (!cur().is(Token::Kind::Equal)) fail("expected '='");
          take();
          c.args.emplace_back(std::move(elem), literal());
          if (!cur().is(Token::Kind::Comma)) break;
          take();
        }
      }
      st.body = std::move(c);
    } else if (kw == "group") {
      st.body = GroupStmt{string("group name")};
    } else if (kw == "expect") {
      ExpectStmt e;
      if (cur().is_word("completed")) {
        take();
        e.kind = ExpectStmt::Kind::Completed;
      } else if (cur().is_word("error")) {
        take();
        if (!cur().is(Token::Kind::Int)) fail("expected an error number");
        e.kind = ExpectStmt::Kind::Error;
        e.error_number = take().integer;
      } else if (cur().is(Token::Kind::Ident) && exception_code_from(cur().text)) {
        e.kind = ExpectStmt::Kind::Exception;
        e.code = *exception_code_from(take().text);
      } else {
        fail("expected 'completed', 'error <n>' or an exception code X101..X106");
      }
      st.body = e;
    } else if (kw == "assert") {
      if (cur().is_word("state")) {
        take();
        if (!cur().is(Token::Kind::Ident)) fail("expected a state name");
        st.body = AssertStateStmt{take().text};
      } else {
        AssertIndicatorStmt a;
        a.element = string("data element name or 'state'");
        if (!cur().is(Token::Kind::Ident) || !predicate_from(cur().text))
          fail("expected allocated, unallocated, defined, undefined, valued or unvalued");
        a.predicate = *predicate_from(take().text);
        st.body = std::move(a);
      }
    } else {
      fail("unknown statement '" + kw + "'");
    }
    if (!cur().is(Token::Kind::End)) fail("unexpected " + describe(cur()) + " at end of statement");
    return st;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;

  const Token& cur() const { return toks_[pos_]; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (!t.is(Token::Kind::End)) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ScriptError("line " + std::to_string(line_) + ", column " + std::to_string(cur().loc.column) + ": " + msg,
                      line_);
  }

  std::string string(const char* what) {
    if (!cur().is(Token::Kind::String)) fail(std::string("expected quoted ") + what);
    return take().text;
  }

  Literal literal() {
    const Token& t = cur();
    switch (t.kind) {
      case Token::Kind::Int:
        return Literal::of_int(take().integer);
      case Token::Kind::Real:
        return Literal::of_real(take().real);
      case Token::Kind::Ident:
        return Literal::of_ident(take().text);
      case Token::Kind::String:
        return Literal::of_string(take().text);
      default:
        fail("expected a literal");
    }
  }
};

}  // namespace

std::optional<Statement> parse_statement(std::string_view line_text, int line, const std::string& file) {
  std::vector<ParseDiagnostic> diags;
  auto toks = tokenize(line_text, file, diags, line);
  if (!diags.empty()) throw ScriptError("line " + std::to_string(line) + ": " + diags.front().message, line);
  if (toks.size() == 1) return std::nullopt;
  return LineParser(std::move(toks), line).statement();
}

ScenarioScript parse_script(std::string_view text, const std::string& file) {
  ScenarioScript script;
  int line = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    ++line;
    std::size_t nl = text.find('\n', start);
    std::string_view ln = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (auto st = parse_statement(ln, line, file)) {
      if (script.statements.empty() && !st->is_call())
        throw ScriptError("line " + std::to_string(line) + ": expect/assert must follow a call", line, 0);
      script.statements.push_back(std::move(*st));
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return script;
}

void validate_statement(const SpecDb& db, const Statement& st, std::size_t index) {
  auto bad = [&](const std::string& msg) {
    throw ScriptError("statement " + std::to_string(index + 1) + " (line " + std::to_string(st.line) + "): " + msg,
                      st.line, index);
  };
  if (const auto* c = std::get_if<CallStmt>(&st.body)) {
    const auto* f = db.find_function(c->function);
    if (!f) bad("unknown function " + quote(c->function));
    for (const auto& [name, lit] : c->args) {
      if (!db.find_element(name)) bad("unknown data element " + quote(name));
      const auto* p = f->find_param(name);
      if (!p || p->direction != Direction::In || p->locality != Locality::External)
        bad(quote(name) + " is not an external input parameter of " + quote(f->name));
    }
  } else if (const auto* g = std::get_if<GroupStmt>(&st.body)) {
    if (!db.find_group(g->group)) bad("unknown group " + quote(g->group));
  } else if (const auto* a = std::get_if<AssertIndicatorStmt>(&st.body)) {
    if (!db.find_element(a->element)) bad("unknown data element " + quote(a->element));
  } else if (const auto* s = std::get_if<AssertStateStmt>(&st.body)) {
    if (!db.state_index(s->state)) bad("unknown state " + s->state);
  }
}

void validate_script(const SpecDb& db, const ScenarioScript& script) {
  for (std::size_t i = 0; i < script.statements.size(); ++i) validate_statement(db, script.statements[i], i);
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

namespace {

bool predicate_holds(const IndicatorTriple& t, IndicatorPredicate p) {
  switch (p) {
    case IndicatorPredicate::Allocated:
      return t.allocated;
    case IndicatorPredicate::Unallocated:
      return !t.allocated;
    case IndicatorPredicate::Defined:
      return t.defined;
    case IndicatorPredicate::Undefined:
      return !t.defined;
    case IndicatorPredicate::Valued:
      return t.valued;
    case IndicatorPredicate::Unvalued:
      return !t.valued;
  }
  return false;
}

std::string describe(const CallOutcome& o) {
  switch (o.kind) {
    case OutcomeKind::Completed:
      return "completed";
    case OutcomeKind::SpecError:
      return "error " + std::to_string(o.error_number);
    case OutcomeKind::Exception: {
      std::string s = "exception";
      for (auto c : o.codes()) s += std::string(" ") + to_string(c);
      return s;
    }
  }
  return {};
}

std::string describe(const ExpectStmt& e) {
  switch (e.kind) {
    case ExpectStmt::Kind::Completed:
      return "completed";
    case ExpectStmt::Kind::Error:
      return "error " + std::to_string(e.error_number);
    case ExpectStmt::Kind::Exception:
      return to_string(e.code);
  }
  return {};
}

bool matches(const ExpectStmt& e, const CallOutcome& o) {
  switch (e.kind) {
    case ExpectStmt::Kind::Completed:
      return o.kind == OutcomeKind::Completed;
    case ExpectStmt::Kind::Error:
      return o.kind == OutcomeKind::SpecError && o.error_number == e.error_number;
    case ExpectStmt::Kind::Exception: {
      if (o.kind != OutcomeKind::Exception) return false;
      auto codes = o.codes();
      return std::find(codes.begin(), codes.end(), e.code) != codes.end();
    }
  }
  return false;
}

}  // namespace

void ScenarioRunner::close_pending() {
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    bool covered = (i + 1 == pending_.size()) && last_expected_;
    if (pending_[i].kind == OutcomeKind::Exception && !covered) ++unexpected_;
  }
  pending_.clear();
  last_expected_ = false;
}

void ScenarioRunner::finish() { close_pending(); }

ScenarioRunner::Step ScenarioRunner::execute(const Statement& st, std::size_t index) {
  Step step;
  auto fail = [&](std::string msg) { step.failure = AssertionFailure{index, st.line, std::move(msg)}; };

  if (const auto* c = std::get_if<CallStmt>(&st.body)) {
    close_pending();
    any_call_ = true;
    pending_.push_back(apply_call(session_, c->function, c->args));
    step.outcomes = pending_;
    return step;
  }
  if (const auto* g = std::get_if<GroupStmt>(&st.body)) {
    close_pending();
    any_call_ = true;
    auto expansion = expand_group(session_.spec(), g->group);
    for (const auto* f : expansion.functions) pending_.push_back(apply_call(session_, f->name));
    step.outcomes = pending_;
    if (!expansion.complete) {
      std::string msg = "group " + quote(g->group) + " is incomplete";
      if (!expansion.diagnostics.empty()) msg += ": undefined member " + quote(expansion.diagnostics.front().subject);
      fail(std::move(msg));
    }
    return step;
  }

  step.checked = true;
  if (!any_call_)
    throw ScriptError("line " + std::to_string(st.line) + ": expect/assert must follow a call", st.line, index);

  if (const auto* e = std::get_if<ExpectStmt>(&st.body)) {
    if (pending_.empty()) {
      fail("expect has no call to bind to");
    } else if (matches(*e, pending_.back())) {
      last_expected_ = true;
    } else {
      fail("expected " + describe(*e) + " from " + quote(pending_.back().function) + ", got " +
           describe(pending_.back()));
    }
  } else if (const auto* a = std::get_if<AssertIndicatorStmt>(&st.body)) {
    const auto& t = session_.indicator(a->element);
    if (!predicate_holds(t, a->predicate))
      fail("expected " + quote(a->element) + " " + to_string(a->predicate) + ", indicators are " + to_string(t));
  } else if (const auto* s = std::get_if<AssertStateStmt>(&st.body)) {
    auto now = session_.operating_state();
    if (now != s->state) fail("expected operating state " + s->state + ", found " + (now.empty() ? "<none>" : now));
  }
  return step;
}

ScenarioResult run_script(std::shared_ptr<const SpecDb> db, const ScenarioScript& script, const std::string& level) {
  validate_script(*db, script);
  Session session = new_session(std::move(db), level);
  ScenarioRunner runner(session);
  ScenarioResult result;
  for (std::size_t i = 0; i < script.statements.size(); ++i) {
    auto step = runner.execute(script.statements[i], i);
    for (auto& o : step.outcomes) result.outcomes.push_back(std::move(o));
    if (step.failure) result.failures.push_back(std::move(*step.failure));
  }
  runner.finish();
  result.unexpected_exceptions = runner.unexpected_exceptions();
  result.final_snapshot = session.snapshot();
  return result;
}

int scenario_exit_code(const ScenarioResult& r) {
  if (r.unexpected_exceptions > 0) return 1;
  if (!r.failures.empty()) return 3;
  return 0;
}

}  // namespace svsp
