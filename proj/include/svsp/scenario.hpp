#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "svsp/engine.hpp"

namespace svsp {

// Scenario script statements, one per line:
//
//   call "FUNCTION NAME" [with "elem" = literal ["," "elem" = literal]*]
//   group "GROUP NAME"
//   expect completed | expect error <INT> | expect X101 ... X106
//   assert "elem" allocated|unallocated|defined|undefined|valued|unvalued
//   assert state <IDENT>

struct CallStmt {
  std::string function;
  Arguments args;
};

struct GroupStmt {
  std::string group;
};

struct ExpectStmt {
  enum class Kind { Completed, Error, Exception };
  Kind kind = Kind::Completed;
  std::int64_t error_number = 0;
  ExceptionCode code = ExceptionCode::X101;
};

enum class IndicatorPredicate { Allocated, Unallocated, Defined, Undefined, Valued, Unvalued };

const char* to_string(IndicatorPredicate p);

struct AssertIndicatorStmt {
  std::string element;
  IndicatorPredicate predicate = IndicatorPredicate::Allocated;
};

struct AssertStateStmt {
  std::string state;
};

struct Statement {
  std::variant<CallStmt, GroupStmt, ExpectStmt, AssertIndicatorStmt, AssertStateStmt> body;
  int line = 0;

  bool is_call() const { return std::holds_alternative<CallStmt>(body) || std::holds_alternative<GroupStmt>(body); }
};

struct ScenarioScript {
  std::vector<Statement> statements;
};

/// Malformed script, or a statement naming something the specification
/// does not declare. `statement` is the zero-based statement index when known.
class ScriptError : public std::runtime_error {
 public:
  ScriptError(const std::string& what, int line, std::optional<std::size_t> statement = std::nullopt)
      : std::runtime_error(what), line(line), statement(statement) {}
  int line;
  std::optional<std::size_t> statement;
};

/// Parses one statement; nullopt for blank or comment-only lines.
std::optional<Statement> parse_statement(std::string_view line_text, int line, const std::string& file = "<input>");

/// Throws ScriptError on syntax errors or when the first statement is an
/// expect/assert (those bind to the most recent call).
ScenarioScript parse_script(std::string_view text, const std::string& file = "<script>");

/// Throws ScriptError for the first statement that references an unknown
/// function, group, element or state, or passes a non-external-input argument.
void validate_script(const SpecDb& db, const ScenarioScript& script);
void validate_statement(const SpecDb& db, const Statement& st, std::size_t index);

struct AssertionFailure {
  std::size_t statement = 0;
  int line = 0;
  std::string message;

  friend bool operator==(const AssertionFailure&, const AssertionFailure&) = default;
};

/// Executes statements against a live session, one at a time.
class ScenarioRunner {
 public:
  explicit ScenarioRunner(Session& session) : session_(session) {}

  struct Step {
    std::vector<CallOutcome> outcomes;     // calls made by this statement
    std::optional<AssertionFailure> failure;
    bool checked = false;                  // statement was an expect/assert
  };

  /// Throws ScriptError when an expect/assert has no preceding call.
  Step execute(const Statement& st, std::size_t index);

  /// Closes the last call; counts any of its exceptions nobody expected.
  void finish();

  std::size_t unexpected_exceptions() const { return unexpected_; }

 private:
  Session& session_;
  std::vector<CallOutcome> pending_;  // outcomes of the most recent call statement
  bool last_expected_ = false;
  bool any_call_ = false;
  std::size_t unexpected_ = 0;

  void close_pending();
};

struct ScenarioResult {
  std::vector<CallOutcome> outcomes;
  std::vector<AssertionFailure> failures;
  std::size_t unexpected_exceptions = 0;  // EXCEPTION outcomes no expect accounted for
  Snapshot final_snapshot;

  friend bool operator==(const ScenarioResult&, const ScenarioResult&) = default;
};

/// Runs a whole script in a fresh session. Throws SessionRefused,
/// LookupError (level) or ScriptError (unknown names, with statement index).
ScenarioResult run_script(std::shared_ptr<const SpecDb> db, const ScenarioScript& script, const std::string& level = {});

/// Exit status for a scenario result: 1 unexpected exceptions, 3 assertion
/// failures only, 0 otherwise.
int scenario_exit_code(const ScenarioResult& r);

}  // namespace svsp
