#include "svsp/engine.hpp"

#include <algorithm>
#include <set>

#include "svsp/checker.hpp"

namespace svsp {

std::string to_string(const IndicatorTriple& t) {
  std::string s;
  s += t.allocated ? "A" : "-";
  s += t.defined ? " D" : " -";
  if (t.valued && t.value)
    s += " V=" + to_source(*t.value);
  else
    s += " -";
  return s;
}

const char* to_string(ExceptionCode c) {
  switch (c) {
    case ExceptionCode::X101:
      return "X101";
    case ExceptionCode::X102:
      return "X102";
    case ExceptionCode::X103:
      return "X103";
    case ExceptionCode::X104:
      return "X104";
    case ExceptionCode::X105:
      return "X105";
    case ExceptionCode::X106:
      return "X106";
  }
  return "X101";
}

std::optional<ExceptionCode> exception_code_from(std::string_view s) {
  for (auto c : {ExceptionCode::X101, ExceptionCode::X102, ExceptionCode::X103, ExceptionCode::X104,
                 ExceptionCode::X105, ExceptionCode::X106})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Completed:
      return "COMPLETED";
    case OutcomeKind::SpecError:
      return "SPEC_ERROR";
    case OutcomeKind::Exception:
      return "EXCEPTION";
  }
  return "COMPLETED";
}

std::vector<ExceptionCode> CallOutcome::codes() const {
  std::set<ExceptionCode> s;
  for (const auto& e : exceptions) s.insert(e.code);
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

namespace {

std::vector<IndicatorTriple> initial_indicators(const SpecDb& db) {
  std::vector<IndicatorTriple> out(db.data_elements().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& e = db.data_elements()[i];
    if (e.initial) out[i] = IndicatorTriple{true, true, true, e.initial};
  }
  return out;
}

}  // namespace

const IndicatorTriple& Session::indicator(std::string_view element) const {
  auto ix = spec_->element_index(element);
  if (!ix) throw LookupError("unknown data element " + quote(element));
  return indicators_[*ix];
}

std::string Session::operating_state() const {
  const auto* se = spec_->state_element();
  if (!se) return {};
  const auto& t = indicators_[*spec_->element_index(se->name)];
  return t.value ? t.value->text : std::string();
}

Snapshot Session::snapshot() const {
  Snapshot s;
  s.state = operating_state();
  s.log_length = log_.size();
  s.indicators.reserve(indicators_.size());
  for (std::size_t i = 0; i < indicators_.size(); ++i)
    s.indicators.emplace_back(spec_->data_elements()[i].name, indicators_[i]);
  return s;
}

void Session::reset() {
  indicators_ = initial_indicators(*spec_);
  log_.clear();
}

Session new_session(std::shared_ptr<const SpecDb> db, std::string level, std::string id) {
  auto diags = run_all_checks(*db);
  if (auto n = count_errors(diags)) {
    throw SessionRefused("specification has " + std::to_string(n) +
                             " static error(s); fix them before running scenarios",
                         n);
  }
  if (level.empty()) {
    if (!db->levels().empty()) level = db->levels().back();
  } else if (!db->level_index(level)) {
    throw LookupError("unknown level " + level);
  }
  Session s;
  s.spec_ = std::move(db);
  s.level_ = std::move(level);
  s.id_ = std::move(id);
  s.indicators_ = initial_indicators(*s.spec_);
  return s;
}

// ---------------------------------------------------------------------------
// Callability
// ---------------------------------------------------------------------------

namespace {

const FunctionDef& require_function(const SpecDb& db, std::string_view fn) {
  const auto* f = db.find_function(fn);
  if (!f) throw LookupError("unknown function " + quote(fn));
  return *f;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
  return s;
}

}  // namespace

Callability check_callability(const Session& s, std::string_view fn) {
  const auto& f = require_function(s.spec(), fn);
  Callability c;
  c.current_state = s.operating_state();
  c.required_states = f.valid_states;
  c.function_level = f.level;
  c.session_level = s.level();
  if (!f.valid_states.empty() &&
      std::find(f.valid_states.begin(), f.valid_states.end(), c.current_state) == f.valid_states.end()) {
    c.callable = false;
    c.reasons.push_back({ExceptionCode::X101, f.name,
                         "current operating state " + (c.current_state.empty() ? "<none>" : c.current_state) +
                             " is not one of " + join(f.valid_states)});
  }
  if (!f.level.empty()) {
    auto fl = s.spec().level_index(f.level);
    auto sl = s.spec().level_index(s.level());
    if (!fl || !sl || *fl > *sl) {
      c.callable = false;
      c.reasons.push_back({ExceptionCode::X106, f.name,
                           "function level " + f.level + " is above session level " + s.level()});
    }
  }
  return c;
}

bool value_admissible(const SpecDb& db, const DataElementDef& e, const Literal& lit) {
  if (!literal_fits_type(e.dtype, lit)) return false;
  if (!e.restriction.admits(lit)) return false;
  if (e.dtype.kind == DataType::Kind::State) return db.state_index(lit.text).has_value();
  if (e.dtype.kind == DataType::Kind::Enum) {
    auto domain = db.value_domain(e);
    return !domain || std::find(domain->begin(), domain->end(), lit.text) != domain->end();
  }
  return true;
}

// ---------------------------------------------------------------------------
// Call application
// ---------------------------------------------------------------------------

namespace {

bool argument_literal_fits(const DataType& t, const Literal& lit) {
  using K = DataType::Kind;
  switch (t.kind) {
    case K::Integer:
    case K::Enum:
    case K::State:
      return literal_fits_type(t, lit);
    case K::Real:
      return lit.is_number();
    case K::String:
    case K::Name:
      return lit.kind == Literal::Kind::String || lit.kind == Literal::Kind::Ident;
    default:
      // Points and structures are classification only: any token stands in.
      return true;
  }
}

class CallSimulator {
 public:
  CallSimulator(const Session& s, const FunctionDef& f) : s_(s), db_(s.spec()), f_(f), scratch_(s.indicators()) {}

  CallOutcome run(const Arguments& args) {
    CallOutcome out;
    out.function = f_.name;

    auto callable = check_callability(s_, f_.name);
    if (!callable.callable) {
      out.kind = OutcomeKind::Exception;
      out.exceptions = std::move(callable.reasons);
      out.state_after = s_.operating_state();
      return out;
    }

    bind(args);
    check_inputs();
    for (const auto& e : f_.effects) {
      out.displayed_effects.push_back(e.text);
      walk(e.clauses, 0);
      if (raised_) break;
    }

    if (!exceptions_.empty()) {
      out.kind = OutcomeKind::Exception;
      out.exceptions = std::move(exceptions_);
      out.state_after = s_.operating_state();
      return out;
    }

    if (raised_) {
      out.kind = OutcomeKind::SpecError;
      out.error_number = *raised_;
      std::string note = "error " + std::to_string(*raised_);
      if (const auto* err = db_.find_error(*raised_)) note += ": " + err->text;
      note += " (values of the other output parameters are implementation dependent)";
      out.displayed_effects.push_back(std::move(note));
    } else {
      // An output operation at the very least allocates its outputs.
      for (const auto& p : f_.params)
        if (p.direction == Direction::Out)
          if (auto ix = db_.element_index(p.element)) scratch_[*ix].allocated = true;
    }

    const auto& before = s_.indicators();
    for (std::size_t i = 0; i < scratch_.size(); ++i)
      if (!(before[i] == scratch_[i]))
        out.deltas.push_back({db_.data_elements()[i].name, before[i], scratch_[i]});
    committed_ = std::move(scratch_);
    if (const auto* se = db_.state_element()) {
      const auto& t = committed_[*db_.element_index(se->name)];
      out.state_after = t.value ? t.value->text : std::string();
    }
    return out;
  }

  std::vector<IndicatorTriple>& committed() { return committed_; }

 private:
  const Session& s_;
  const SpecDb& db_;
  const FunctionDef& f_;
  std::vector<IndicatorTriple> scratch_;
  std::vector<IndicatorTriple> committed_;
  std::vector<ValidationException> exceptions_;
  std::set<std::pair<ExceptionCode, std::string>> reported_;
  std::optional<std::int64_t> raised_;

  void except(ExceptionCode c, const std::string& subject, std::string detail) {
    if (!reported_.insert({c, subject}).second) return;
    exceptions_.push_back({c, subject, std::move(detail)});
  }

  std::size_t index_of(const std::string& element) const {
    auto ix = db_.element_index(element);
    if (!ix) throw LookupError("unknown data element " + quote(element));
    return *ix;
  }

  void bind(const Arguments& args) {
    for (const auto& [name, lit] : args) {
      std::size_t ix = index_of(name);
      const auto& el = db_.data_elements()[ix];
      const auto* p = f_.find_param(name);
      bool ok = argument_literal_fits(el.dtype, lit) && el.restriction.admits(lit) &&
                (!p || p->restriction.admits(lit)) && (!el.dtype.storable() || value_admissible(db_, el, lit));
      if (!ok) {
        std::string why = "argument " + to_source(lit) + " for " + quote(name) + " violates type " +
                          to_string(el.dtype);
        if (!el.restriction.is_none()) why += " / restriction " + to_source(el.restriction);
        if (p && !p->restriction.is_none()) why += " / parameter restriction " + to_source(p->restriction);
        except(ExceptionCode::X105, name, std::move(why));
        continue;
      }
      if (el.dtype.storable())
        scratch_[ix] = IndicatorTriple{true, true, true, lit};
      else
        scratch_[ix] = IndicatorTriple{true, true, false, std::nullopt};
    }
  }

  // Every input parameter must be initialised before any effect reads it.
  void check_inputs() {
    if (f_.effects.empty()) return;
    for (const auto& p : f_.params) {
      if (p.direction != Direction::In) continue;
      const auto& t = scratch_[index_of(p.element)];
      if (!t.allocated)
        except(ExceptionCode::X102, p.element, "input " + quote(p.element) + " is not allocated");
      else if (!t.defined)
        except(ExceptionCode::X103, p.element, "input " + quote(p.element) + " is not defined");
    }
  }

  void walk(const std::vector<Clause>& clauses, int depth) {
    for (const auto& c : clauses) {
      if (const auto* r = std::get_if<RequiresClause>(&c.body)) {
        const auto& t = scratch_[index_of(r->element)];
        if (r->flags.allocated && !t.allocated)
          except(ExceptionCode::X102, r->element, quote(r->element) + " is required to be allocated");
        else if (r->flags.defined && !t.defined)
          except(ExceptionCode::X103, r->element, quote(r->element) + " is required to be defined");
        if (r->condition.kind != ValueCondition::Kind::None) {
          if (!t.valued)
            except(ExceptionCode::X104, r->element, quote(r->element) + " is required to have a known value");
          else if (r->condition.kind == ValueCondition::Kind::Equals && !(*t.value == r->condition.literal))
            except(ExceptionCode::X105, r->element,
                   quote(r->element) + " is " + to_source(*t.value) + ", required " +
                       to_source(r->condition.literal));
        }
      } else if (const auto* s = std::get_if<SetsClause>(&c.body)) {
        std::size_t ix = index_of(s->element);
        auto& t = scratch_[ix];
        t.allocated = true;
        if (s->flags.defined) t.defined = true;
        if (s->value) {
          const auto& el = db_.data_elements()[ix];
          if (!value_admissible(db_, el, *s->value)) {
            except(ExceptionCode::X105, s->element,
                   "value " + to_source(*s->value) + " is not admissible for " + quote(s->element));
          } else {
            t.defined = true;
            t.valued = true;
            t.value = *s->value;
          }
        }
      } else if (const auto* w = std::get_if<WhenClause>(&c.body)) {
        const auto& t = scratch_[index_of(w->element)];
        if (!t.valued) {
          except(ExceptionCode::X104, w->element,
                 "conditional test on " + quote(w->element) + ", which has no known value");
          continue;
        }
        bool equal = *t.value == w->operand;
        bool take_then = w->relation == Relation::Equal ? equal : !equal;
        walk(take_then ? w->then_branch : w->else_branch, depth + 1);
        if (raised_) return;
      } else if (const auto* on = std::get_if<OnErrorClause>(&c.body)) {
        // At top level the list only declares the possible numbers.
        if (depth > 0 && !raised_ && !on->numbers.empty()) raised_ = on->numbers.front();
      }
    }
  }
};

}  // namespace

CallOutcome apply_call(Session& s, std::string_view fn, const Arguments& args) {
  const auto& f = require_function(s.spec(), fn);
  for (const auto& [name, lit] : args) {
    if (!s.spec().find_element(name)) throw LookupError("unknown data element " + quote(name));
    const auto* p = f.find_param(name);
    if (!p || p->direction != Direction::In || p->locality != Locality::External)
      throw ArgumentError(quote(name) + " is not an external input parameter of " + quote(f.name));
  }
  CallSimulator sim(s, f);
  CallOutcome out = sim.run(args);
  if (out.kind != OutcomeKind::Exception) s.indicators_ = std::move(sim.committed());
  s.log_.push_back({s.log_.size(), f.name, args, out});
  return out;
}

CallOutcome dry_run(const Session& s, std::string_view fn, const Arguments& args) {
  Session copy = s;
  return apply_call(copy, fn, args);
}

}  // namespace svsp
