#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svsp/model.hpp"

namespace svsp {

/// How much is known about one data element at a point in a scenario.
/// Model law: valued implies defined implies allocated; value present iff valued.
struct IndicatorTriple {
  bool allocated = false;
  bool defined = false;
  bool valued = false;
  std::optional<Literal> value;

  bool well_formed() const {
    return (!valued || defined) && (!defined || allocated) && (valued == value.has_value());
  }

  friend bool operator==(const IndicatorTriple&, const IndicatorTriple&) = default;
};

/// "A D V=GKOP", "A D -", "- - -".
std::string to_string(const IndicatorTriple& t);

enum class ExceptionCode {
  X101,  // not callable in the current operating state
  X102,  // input not allocated
  X103,  // input not defined
  X104,  // conditional test or value requirement on an element without a value
  X105,  // value violates restriction, membership or requirement
  X106,  // function level above session level
};

const char* to_string(ExceptionCode c);
std::optional<ExceptionCode> exception_code_from(std::string_view s);

struct ValidationException {
  ExceptionCode code;
  std::string subject;  // element or function name
  std::string detail;

  friend bool operator==(const ValidationException&, const ValidationException&) = default;
};

enum class OutcomeKind { Completed, SpecError, Exception };

const char* to_string(OutcomeKind k);

struct IndicatorDelta {
  std::string element;
  IndicatorTriple before;
  IndicatorTriple after;

  friend bool operator==(const IndicatorDelta&, const IndicatorDelta&) = default;
};

struct CallOutcome {
  std::string function;
  OutcomeKind kind = OutcomeKind::Completed;
  std::int64_t error_number = 0;  // SpecError only
  std::vector<ValidationException> exceptions;
  std::vector<std::string> displayed_effects;
  std::vector<IndicatorDelta> deltas;  // empty for Exception
  std::string state_after;

  /// Distinct exception codes in ascending order.
  std::vector<ExceptionCode> codes() const;

  friend bool operator==(const CallOutcome&, const CallOutcome&) = default;
};

using Arguments = std::vector<std::pair<std::string, Literal>>;

struct CallRecord {
  std::size_t index = 0;
  std::string function;
  Arguments args;
  CallOutcome outcome;

  friend bool operator==(const CallRecord&, const CallRecord&) = default;
};

struct Snapshot {
  std::string state;
  std::vector<std::pair<std::string, IndicatorTriple>> indicators;  // element declaration order
  std::size_t log_length = 0;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// Unknown function, element, group, state or level.
class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument keyed by something other than an external input parameter.
class ArgumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Session creation refused because the specification has static errors.
class SessionRefused : public std::runtime_error {
 public:
  SessionRefused(const std::string& what, std::size_t errors) : std::runtime_error(what), error_count(errors) {}
  std::size_t error_count;
};

/// Dynamic scenario state over one shared, immutable specification.
/// Single owner: calls on one session must be serialized by the caller.
class Session {
 public:
  const SpecDb& spec() const { return *spec_; }
  const std::shared_ptr<const SpecDb>& spec_ptr() const { return spec_; }
  const std::string& level() const { return level_; }
  const std::string& id() const { return id_; }

  const std::vector<IndicatorTriple>& indicators() const { return indicators_; }
  const IndicatorTriple& indicator(std::string_view element) const;
  /// Current value of the designated state element, or "" if there is none.
  std::string operating_state() const;
  const std::vector<CallRecord>& log() const { return log_; }
  Snapshot snapshot() const;

  /// Back to the session-start indicators; the log is cleared.
  void reset();

 private:
  friend Session new_session(std::shared_ptr<const SpecDb> db, std::string level, std::string id);
  friend CallOutcome apply_call(Session& s, std::string_view fn, const Arguments& args);

  Session() = default;

  std::shared_ptr<const SpecDb> spec_;
  std::string level_;
  std::string id_;
  std::vector<IndicatorTriple> indicators_;
  std::vector<CallRecord> log_;
};

/// Every element starts unallocated, undefined and unvalued except those
/// with an init literal, which start fully known. An empty `level` selects
/// the highest declared level. Throws SessionRefused if the specification
/// has ERROR diagnostics and LookupError for an undeclared level.
Session new_session(std::shared_ptr<const SpecDb> db, std::string level = {}, std::string id = {});

struct Callability {
  bool callable = true;
  std::vector<ValidationException> reasons;  // X101 and/or X106
  std::string current_state;
  std::vector<std::string> required_states;
  std::string function_level;
  std::string session_level;
};

/// Never mutates. Throws LookupError for an unknown function.
Callability check_callability(const Session& s, std::string_view fn);

/// Simulates one call. Validation exceptions abort the call with no change
/// to the indicators; the call is logged either way.
CallOutcome apply_call(Session& s, std::string_view fn, const Arguments& args = {});

/// apply_call on a copy; `s` is untouched and nothing is logged.
CallOutcome dry_run(const Session& s, std::string_view fn, const Arguments& args = {});

/// Does `lit` satisfy everything the element (and parameter) demand of a value?
bool value_admissible(const SpecDb& db, const DataElementDef& e, const Literal& lit);

}  // namespace svsp
