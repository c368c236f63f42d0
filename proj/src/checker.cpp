#include "svsp/checker.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace svsp {

const std::vector<CatalogEntry>& check_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {"E001", Severity::Error, "duplicate function name"},
      {"E002", Severity::Error, "duplicate data element name"},
      {"E003", Severity::Error, "duplicate error number"},
      {"E004", Severity::Error, "duplicate state, level or enum name"},
      {"E005", Severity::Error, "parameter references undefined data element"},
      {"E006", Severity::Error, "effect clause references a non-parameter"},
      {"E007", Severity::Error, "parameter restriction not subsumed by element restriction"},
      {"E008", Severity::Error, "restriction kind incompatible with data type"},
      {"E009", Severity::Error, "error number not in error table"},
      {"E010", Severity::Error, "undeclared state, level or enum type"},
      {"E014", Severity::Error, "value on a type that cannot hold one"},
      {"E015", Severity::Error, "parameter direction discipline violated"},
      {"E016", Severity::Error, "missing designated state element"},
      {"W011", Severity::Warning, "data element in no parameter list"},
      {"W012", Severity::Warning, "function with no effects"},
      {"W013", Severity::Warning, "bundle or group member undefined"},
      {"W017", Severity::Warning, "literal outside the element's restriction"},
  };
  return catalog;
}

bool literal_fits_type(const DataType& t, const Literal& lit) {
  switch (t.kind) {
    case DataType::Kind::Integer:
      return lit.kind == Literal::Kind::Integer;
    case DataType::Kind::Enum:
    case DataType::Kind::State:
      return lit.kind == Literal::Kind::Ident;
    default:
      return false;
  }
}

namespace {

bool restriction_fits_type(const DataType& t, const Restriction& r) {
  using K = Restriction::Kind;
  switch (r.kind) {
    case K::None:
      return true;
    case K::IntRange:
      return t.kind == DataType::Kind::Integer || t.kind == DataType::Kind::Real;
    case K::RealRange:
      return t.kind == DataType::Kind::Real;
    case K::Membership:
      return t.kind == DataType::Kind::Enum || t.kind == DataType::Kind::State;
  }
  return false;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> words(std::string_view s) {
  static const std::set<std::string> stop = {"a", "an", "the", "of", "in", "on", "to", "for", "by", "and", "or"};
  std::vector<std::string> out;
  std::istringstream is(lower(s));
  std::string w;
  while (is >> w)
    if (!stop.count(w)) out.push_back(w);
  return out;
}

class Checker {
 public:
  explicit Checker(const SpecDb& db) : db_(db) {}

  std::vector<Diagnostic> run() {
    diags_ = db_.build_diagnostics();
    check_states();
    for (const auto& e : db_.data_elements()) check_element(e);
    for (const auto& b : db_.bundles()) check_bundle(b);
    for (const auto& g : db_.groups()) check_group(g);
    for (const auto& f : db_.functions()) check_function(f);
    check_unreferenced();
    sort_diagnostics(diags_);
    return std::move(diags_);
  }

 private:
  const SpecDb& db_;
  std::vector<Diagnostic> diags_;

  void emit(const char* code, const SourceLocation& loc, std::string subject, std::string message,
            std::vector<std::string> related = {}) {
    diags_.push_back(make_diagnostic(code, loc, std::move(subject), std::move(message), std::move(related)));
  }

  void check_states() {
    if (db_.has_states_decl() && !db_.state_index(db_.initial_state()))
      emit("E010", db_.initial_state_location(), db_.initial_state(), "initial state is not a declared state");

    std::vector<const DataElementDef*> state_elems;
    for (const auto& e : db_.data_elements())
      if (e.dtype.kind == DataType::Kind::State) state_elems.push_back(&e);

    for (std::size_t i = 1; i < state_elems.size(); ++i)
      emit("E016", state_elems[i]->loc, state_elems[i]->name,
           "second element of kind state; the operating state must be designated by exactly one element (first is " +
               quote(state_elems[0]->name) + ")");

    if (state_elems.empty()) {
      auto it = std::find_if(db_.functions().begin(), db_.functions().end(),
                             [](const FunctionDef& f) { return !f.valid_states.empty(); });
      if (it != db_.functions().end())
        emit("E016", it->loc, it->name,
             "function declares valid states but no data element of kind state holds the operating state");
      return;
    }
    const auto* se = state_elems.front();
    if (!se->initial) {
      emit("E016", se->loc, se->name, "the operating-state element needs an init value");
    } else if (db_.has_states_decl() && se->initial->kind == Literal::Kind::Ident &&
               se->initial->text != db_.initial_state() && db_.state_index(se->initial->text)) {
      emit("E016", se->loc, se->name,
           "init value " + se->initial->text + " differs from the declared initial state " + db_.initial_state());
    }
  }

  void check_type_refs(const DataType& t, const DataElementDef& e) {
    if (t.kind == DataType::Kind::Enum && !db_.find_enum(t.enum_name))
      emit("E010", e.loc, t.enum_name, "undeclared enum type used by data element " + quote(e.name));
    for (const auto& a : t.args) check_type_refs(a, e);
  }

  // Literal placed into element `e` by an init value or a clause.
  void check_value_literal(const DataElementDef& e, const Literal& lit, const SourceLocation& loc,
                           const std::string& context) {
    if (!e.dtype.storable()) {
      emit("E014", loc, e.name,
           context + ": elements of type " + to_string(e.dtype) + " are classification only and carry no value");
      return;
    }
    if (!literal_fits_type(e.dtype, lit)) {
      emit("E014", loc, e.name, context + ": literal " + to_source(lit) + " cannot be stored in an element of type " +
                                    to_string(e.dtype));
      return;
    }
    if (e.dtype.kind == DataType::Kind::State) {
      if (!db_.state_index(lit.text)) {
        emit("E010", loc, lit.text, context + ": " + lit.text + " is not a declared state");
        return;
      }
    }
    if (!e.restriction.admits(lit)) {
      emit("W017", loc, e.name,
           context + ": " + to_source(lit) + " lies outside the restriction " + to_source(e.restriction));
      return;
    }
    if (e.dtype.kind == DataType::Kind::Enum) {
      auto domain = db_.value_domain(e);
      if (domain && std::find(domain->begin(), domain->end(), lit.text) == domain->end())
        emit("W017", loc, e.name, context + ": " + lit.text + " is not a value of enum " + e.dtype.enum_name);
    }
  }

  void check_element(const DataElementDef& e) {
    check_type_refs(e.dtype, e);
    if (!restriction_fits_type(e.dtype, e.restriction)) {
      emit("E008", e.loc, e.name,
           "restriction " + to_source(e.restriction) + " cannot apply to data type " + to_string(e.dtype));
    } else if (e.restriction.kind == Restriction::Kind::Membership) {
      std::optional<std::vector<std::string>> base;
      if (e.dtype.kind == DataType::Kind::Enum) {
        if (const auto* en = db_.find_enum(e.dtype.enum_name)) base = en->values;
      } else {
        base = db_.states();
      }
      if (base)
        for (const auto& v : e.restriction.values)
          if (std::find(base->begin(), base->end(), v) == base->end())
            emit(e.dtype.kind == DataType::Kind::State ? "E010" : "W017", e.loc,
                 e.dtype.kind == DataType::Kind::State ? v : e.name,
                 v + " in the membership restriction is not a value of " + to_string(e.dtype));
    }
    if (e.initial) check_value_literal(e, *e.initial, e.loc, "init value");
  }

  void check_bundle(const BundleDef& b) {
    for (const auto& m : b.members)
      if (!db_.find_element(m))
        emit("W013", b.loc, m, "bundle " + quote(b.name) + " lists an undefined data element",
             suggest_similar_names(m, db_));
  }

  void check_group(const GroupDef& g) {
    for (const auto& m : g.members)
      if (!db_.find_function(m)) emit("W013", g.loc, m, "group " + quote(g.name) + " calls an undefined function");
  }

  void check_function(const FunctionDef& f) {
    for (const auto& s : f.valid_states)
      if (!db_.state_index(s)) emit("E010", f.loc, s, "function " + quote(f.name) + " lists an undeclared state");
    if (!f.level.empty() && !db_.level_index(f.level))
      emit("E010", f.loc, f.level, "function " + quote(f.name) + " names an undeclared level");

    for (const auto& p : f.declared_params)
      if (p.is_bundle_ref() && !db_.find_bundle(p.bundle))
        emit("W013", p.loc, p.bundle, "function " + quote(f.name) + " takes an undefined bundle");

    for (const auto& p : f.params) {
      const auto* el = db_.find_element(p.element);
      if (!el) {
        std::string via = p.bundle.empty() ? "" : " (via bundle " + quote(p.bundle) + ")";
        emit("E005", p.loc, p.element,
             "parameter of " + quote(f.name) + via + " is not defined as a data element",
             suggest_similar_names(p.element, db_));
        continue;
      }
      if (auto d = check_restriction_compatibility(*el, p)) {
        diags_.push_back(std::move(*d));
      } else if (p.restriction.kind == Restriction::Kind::Membership && el->restriction.is_none()) {
        auto domain = db_.value_domain(*el);
        if (domain)
          for (const auto& v : p.restriction.values)
            if (std::find(domain->begin(), domain->end(), v) == domain->end())
              emit(el->dtype.kind == DataType::Kind::State ? "E010" : "W017", p.loc,
                   el->dtype.kind == DataType::Kind::State ? v : el->name,
                   "parameter restriction of " + quote(f.name) + " names " + v + ", not a value of " +
                       to_string(el->dtype));
      }
    }

    if (f.effects.empty()) emit("W012", f.loc, f.name, "function has no effects");

    std::set<std::string> outs_set;
    for (const auto& e : f.effects) check_clauses(f, e.clauses, outs_set);
  }

  void check_clauses(const FunctionDef& f, const std::vector<Clause>& clauses, std::set<std::string>& outs_set) {
    for (const auto& c : clauses) {
      if (const auto* on = std::get_if<OnErrorClause>(&c.body)) {
        for (auto n : on->numbers)
          if (!db_.find_error(n))
            emit("E009", c.loc, std::to_string(n), "error number used by " + quote(f.name) + " is not in the error table");
        continue;
      }
      const std::string& name = std::visit(
          [](const auto& b) -> const std::string& {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, OnErrorClause>) {
              static const std::string none;
              return none;
            } else {
              return b.element;
            }
          },
          c.body);
      const ParameterDef* p = f.find_param(name);
      if (!p) {
        emit("E006", c.loc, name, "effect of " + quote(f.name) + " names an element that is not one of its parameters");
        if (const auto* w = std::get_if<WhenClause>(&c.body)) {
          check_clauses(f, w->then_branch, outs_set);
          check_clauses(f, w->else_branch, outs_set);
        }
        continue;
      }
      const auto* el = db_.find_element(name);  // null when E005 already fired

      if (const auto* r = std::get_if<RequiresClause>(&c.body)) {
        if (p->direction == Direction::Out && !outs_set.count(name))
          emit("E015", c.loc, name,
               quote(f.name) + " requires its output parameter before any effect sets it");
        if (el && r->condition.kind != ValueCondition::Kind::None) {
          if (!el->dtype.storable())
            emit("E014", c.loc, name,
                 "value condition on an element of type " + to_string(el->dtype) + ", which carries no value");
          else if (r->condition.kind == ValueCondition::Kind::Equals)
            check_value_literal(*el, r->condition.literal, c.loc, "requires value");
        }
      } else if (const auto* s = std::get_if<SetsClause>(&c.body)) {
        if (p->direction == Direction::In)
          emit("E015", c.loc, name, quote(f.name) + " sets an input parameter; parameters are input or output, not both");
        else
          outs_set.insert(name);
        if (el && s->value) check_value_literal(*el, *s->value, c.loc, "sets value");
      } else if (const auto* w = std::get_if<WhenClause>(&c.body)) {
        if (el) check_value_literal(*el, w->operand, c.loc, "conditional test");
        check_clauses(f, w->then_branch, outs_set);
        check_clauses(f, w->else_branch, outs_set);
      }
    }
  }

  void check_unreferenced() {
    std::set<std::string, std::less<>> used;
    for (const auto& f : db_.functions())
      for (const auto& p : f.params) used.insert(p.element);
    for (const auto& e : db_.data_elements())
      if (!used.count(e.name))
        emit("W011", e.loc, e.name, "data element appears in no parameter list, so no function manipulates it");
  }
};

}  // namespace

std::vector<Diagnostic> run_all_checks(const SpecDb& db) { return Checker(db).run(); }

std::optional<Diagnostic> check_restriction_compatibility(const DataElementDef& element, const ParameterDef& param) {
  if (param.restriction.is_none()) return std::nullopt;
  if (!restriction_fits_type(element.dtype, param.restriction))
    return make_diagnostic("E008", param.loc, element.name,
                           "parameter restriction " + to_source(param.restriction) + " cannot apply to data type " +
                               to_string(element.dtype));
  switch (subsumes(param.restriction, element.restriction)) {
    case Subsumption::Yes:
      return std::nullopt;
    case Subsumption::No:
      return make_diagnostic("E007", param.loc, element.name,
                             "parameter restriction " + to_source(param.restriction) +
                                 " is not contained in the element restriction " + to_source(element.restriction));
    case Subsumption::Incompatible:
      break;
  }
  return make_diagnostic("E008", param.loc, element.name,
                         "parameter restriction " + to_source(param.restriction) +
                             " is of a different kind than the element restriction " + to_source(element.restriction));
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::string> suggest_similar_names(std::string_view missing, const SpecDb& db) {
  const std::string key = lower(missing);
  const auto key_words = words(missing);
  std::vector<std::pair<std::size_t, std::string>> hits;
  for (const auto& e : db.data_elements()) {
    if (e.name == missing) return {};
    std::size_t d = edit_distance(key, lower(e.name));
    bool shares = false;
    for (const auto& w : words(e.name))
      if (std::find(key_words.begin(), key_words.end(), w) != key_words.end()) shares = true;
    if (d <= 2 || shares) hits.emplace_back(d, e.name);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::string> out;
  for (auto& h : hits) out.push_back(std::move(h.second));
  return out;
}

std::size_t count_errors(const std::vector<Diagnostic>& diags) {
  return static_cast<std::size_t>(
      std::count_if(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

std::size_t count_warnings(const std::vector<Diagnostic>& diags) { return diags.size() - count_errors(diags); }

std::vector<Diagnostic> promote_warnings(std::vector<Diagnostic> diags) {
  for (auto& d : diags) d.severity = Severity::Error;
  return diags;
}

}  // namespace svsp
