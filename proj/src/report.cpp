#include "svsp/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace svsp {

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kRed = "\x1b[31m";
constexpr const char* kYellow = "\x1b[33m";
constexpr const char* kBold = "\x1b[1m";
constexpr const char* kReset = "\x1b[0m";

std::string join(const std::vector<std::string>& v, std::string_view sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i];
  }
  return s;
}

std::string quoted_list(const std::vector<std::string>& v) {
  std::vector<std::string> q;
  q.reserve(v.size());
  for (const auto& x : v) q.push_back(quote(x));
  return join(q, ", ");
}

}  // namespace

std::string render_diagnostics(const std::vector<Diagnostic>& diags, DiagFormat format, bool color) {
  std::string out;
  if (format == DiagFormat::JsonLines) {
    for (const auto& d : diags) out += dump(diagnostic_to_json(d)) + "\n";
    return out;
  }
  std::size_t errors = 0, warnings = 0;
  for (const auto& d : diags) {
    (d.severity == Severity::Error ? errors : warnings)++;
    std::string code = d.code;
    std::string sev = to_string(d.severity);
    if (color) {
      const char* c = d.severity == Severity::Error ? kRed : kYellow;
      code = std::string(kBold) + c + code + kReset;
      sev = std::string(c) + sev + kReset;
    }
    out += code + " " + sev + " " + d.location.file + ":" + std::to_string(d.location.line) + ":" +
           std::to_string(d.location.column) + " " + quote(d.subject) + " — " + d.message;
    if (!d.related.empty()) out += " [related: " + quoted_list(d.related) + "]";
    out += "\n";
  }
  out += std::to_string(errors) + " errors, " + std::to_string(warnings) + " warnings\n";
  return out;
}

ordered_json diagnostic_to_json(const Diagnostic& d) {
  ordered_json j;
  j["code"] = d.code;
  j["severity"] = to_string(d.severity);
  j["file"] = d.location.file;
  j["line"] = d.location.line;
  j["col"] = d.location.column;
  j["subject"] = d.subject;
  j["message"] = d.message;
  j["related"] = d.related;
  return j;
}

Diagnostic diagnostic_from_json(const nlohmann::json& j) {
  Diagnostic d;
  d.code = j.at("code").get<std::string>();
  d.severity = j.at("severity").get<std::string>() == "warning" ? Severity::Warning : Severity::Error;
  d.location.file = j.at("file").get<std::string>();
  d.location.line = j.at("line").get<int>();
  d.location.column = j.at("col").get<int>();
  d.subject = j.at("subject").get<std::string>();
  d.message = j.at("message").get<std::string>();
  d.related = j.at("related").get<std::vector<std::string>>();
  return d;
}

// ---------------------------------------------------------------------------
// Listings
// ---------------------------------------------------------------------------

std::optional<ListingOrder> listing_order_from(std::string_view s) {
  for (auto o : {ListingOrder::ByName, ListingOrder::ByType, ListingOrder::ByLevel, ListingOrder::ByState,
                 ListingOrder::ByDeclaration})
    if (s == to_string(o)) return o;
  return std::nullopt;
}

const char* to_string(ListingOrder o) {
  switch (o) {
    case ListingOrder::ByName:
      return "name";
    case ListingOrder::ByType:
      return "type";
    case ListingOrder::ByLevel:
      return "level";
    case ListingOrder::ByState:
      return "state";
    case ListingOrder::ByDeclaration:
      return "decl";
  }
  return "decl";
}

namespace {

// Unknown states and levels sort after every declared one.
std::size_t rank_or_end(std::optional<std::size_t> ix, std::size_t end) { return ix ? *ix : end; }

std::size_t earliest_state(const SpecDb& db, const std::vector<std::string>& states) {
  if (states.empty()) return 0;
  std::size_t best = db.states().size();
  for (const auto& s : states) best = std::min(best, rank_or_end(db.state_index(s), db.states().size()));
  return best;
}

std::size_t level_rank(const SpecDb& db, const std::string& level) {
  if (level.empty()) return 0;
  return 1 + rank_or_end(db.level_index(level), db.levels().size());
}

}  // namespace

Listing function_listing(const SpecDb& db, ListingOrder ordering) {
  struct Keyed {
    std::size_t rank;
    std::string type;
    std::size_t decl;
    ListingRow row;
  };
  std::vector<Keyed> keyed;
  const auto& fns = db.functions();
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const auto& f = fns[i];
    Keyed k{0, f.ftype, i, ListingRow{f.name, f.ftype, f.level, f.valid_states}};
    if (ordering == ListingOrder::ByLevel) k.rank = level_rank(db, f.level);
    if (ordering == ListingOrder::ByState) k.rank = earliest_state(db, f.valid_states);
    keyed.push_back(std::move(k));
  }
  std::stable_sort(keyed.begin(), keyed.end(), [&](const Keyed& a, const Keyed& b) {
    switch (ordering) {
      case ListingOrder::ByDeclaration:
        return a.decl < b.decl;
      case ListingOrder::ByName:
        return a.row.name < b.row.name;
      case ListingOrder::ByType:
        return std::tie(a.type, a.row.name) < std::tie(b.type, b.row.name);
      case ListingOrder::ByLevel:
      case ListingOrder::ByState:
        return std::tie(a.rank, a.row.name) < std::tie(b.rank, b.row.name);
    }
    return false;
  });
  Listing l;
  l.ordering = ordering;
  for (auto& k : keyed) l.rows.push_back(std::move(k.row));
  return l;
}

std::string render_listing(const SpecDb& db, const Listing& listing) {
  std::size_t wname = 4, wtype = 4, wlevel = 5;
  for (const auto& r : listing.rows) {
    wname = std::max(wname, r.name.size());
    wtype = std::max(wtype, r.type.size());
    wlevel = std::max(wlevel, r.level.size());
  }
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  std::string out = pad("NAME", wname) + "  " + pad("TYPE", wtype) + "  " + pad("LEVEL", wlevel) + "  STATES\n";
  std::optional<std::size_t> section;
  for (const auto& r : listing.rows) {
    if (listing.ordering == ListingOrder::ByState) {
      std::size_t s = earliest_state(db, r.states);
      if (section != s) {
        section = s;
        out += "[" + (s < db.states().size() ? db.states()[s] : std::string("?")) + "]\n";
      }
    }
    out += pad(r.name, wname) + "  " + pad(r.type.empty() ? "-" : r.type, wtype) + "  " +
           pad(r.level.empty() ? "-" : r.level, wlevel) + "  " + (r.states.empty() ? "*" : join(r.states, " ")) +
           "\n";
  }
  out += std::to_string(listing.rows.size()) + " functions, ordered by " + to_string(listing.ordering) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Cross references
// ---------------------------------------------------------------------------

namespace {

void touches(const std::vector<Clause>& clauses, std::string_view element, std::vector<std::string>& kinds) {
  for (const auto& c : clauses) {
    if (const auto* r = std::get_if<RequiresClause>(&c.body)) {
      if (r->element == element) kinds.push_back("requires");
    } else if (const auto* s = std::get_if<SetsClause>(&c.body)) {
      if (s->element == element) kinds.push_back("sets");
    } else if (const auto* w = std::get_if<WhenClause>(&c.body)) {
      if (w->element == element) kinds.push_back("when");
      touches(w->then_branch, element, kinds);
      touches(w->else_branch, element, kinds);
    }
  }
}

}  // namespace

CrossReference cross_reference(const SpecDb& db, std::string_view element) {
  if (!db.find_element(element)) throw LookupError("unknown data element " + quote(element));
  CrossReference x;
  x.element = std::string(element);
  for (const auto& f : db.functions()) {
    for (const auto& p : f.params)
      if (p.element == element) x.uses.push_back({f.name, p.direction, p.locality, p.bundle});
    for (std::size_t i = 0; i < f.effects.size(); ++i) {
      std::vector<std::string> kinds;
      touches(f.effects[i].clauses, element, kinds);
      if (!kinds.empty()) x.effects.push_back({f.name, i, f.effects[i].cls, f.effects[i].text, std::move(kinds)});
    }
  }
  for (const auto& b : db.bundles())
    if (std::find(b.members.begin(), b.members.end(), element) != b.members.end()) x.bundles.push_back(b.name);
  return x;
}

std::string render_cross_reference(const CrossReference& x) {
  std::string out = "data element " + quote(x.element) + "\n";
  out += "  used by " + std::to_string(x.uses.size()) + " function(s)\n";
  for (const auto& u : x.uses) {
    out += "    " + quote(u.function) + " " + to_string(u.direction) + " " + to_string(u.locality);
    if (!u.bundle.empty()) out += " via bundle " + quote(u.bundle);
    out += "\n";
  }
  out += "  touched by " + std::to_string(x.effects.size()) + " effect(s)\n";
  for (const auto& e : x.effects)
    out += "    " + quote(e.function) + " effect " + std::to_string(e.effect_index + 1) + " (" + to_string(e.cls) +
           ", " + join(e.clause_kinds, " ") + "): " + e.text + "\n";
  out += "  in " + std::to_string(x.bundles.size()) + " bundle(s)";
  if (!x.bundles.empty()) out += ": " + quoted_list(x.bundles);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Scenario output
// ---------------------------------------------------------------------------

std::string render_outcome(const CallOutcome& o, std::size_t ordinal) {
  std::string out = "[" + std::to_string(ordinal) + "] " + quote(o.function) + " -> " + to_string(o.kind);
  if (o.kind == OutcomeKind::SpecError) out += " " + std::to_string(o.error_number);
  out += "  (state " + (o.state_after.empty() ? std::string("<none>") : o.state_after) + ")\n";
  for (const auto& e : o.displayed_effects) out += "    effect: " + e + "\n";
  for (const auto& d : o.deltas)
    out += "    " + quote(d.element) + ": " + to_string(d.before) + " -> " + to_string(d.after) + "\n";
  for (const auto& x : o.exceptions)
    out += "    " + std::string(to_string(x.code)) + " " + quote(x.subject) + ": " + x.detail + "\n";
  return out;
}

std::string render_failure(const AssertionFailure& f) {
  return "FAILED statement " + std::to_string(f.statement + 1) + " (line " + std::to_string(f.line) +
         "): " + f.message + "\n";
}

std::string render_scenario(const ScenarioResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.outcomes.size(); ++i) out += render_outcome(r.outcomes[i], i + 1);
  for (const auto& f : r.failures) out += render_failure(f);
  out += std::to_string(r.outcomes.size()) + " calls, " + std::to_string(r.failures.size()) +
         " assertion failures, " + std::to_string(r.unexpected_exceptions) + " unexpected exceptions\n";
  out += "final state " + (r.final_snapshot.state.empty() ? std::string("<none>") : r.final_snapshot.state) + "\n";
  return out;
}

std::string render_snapshot(const Snapshot& s) {
  std::size_t w = 0;
  for (const auto& [name, t] : s.indicators) w = std::max(w, name.size() + 2);
  std::string out = "state " + (s.state.empty() ? std::string("<none>") : s.state) + ", " +
                    std::to_string(s.log_length) + " calls logged\n";
  for (const auto& [name, t] : s.indicators) {
    std::string q = quote(name);
    q.resize(w, ' ');
    out += "  " + q + "  " + to_string(t) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

ordered_json literal_to_json(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Integer:
      return l.integer;
    case Literal::Kind::Real:
      return l.real;
    case Literal::Kind::Ident:
    case Literal::Kind::String:
      return l.text;
  }
  return nullptr;
}

ordered_json triple_to_json(const IndicatorTriple& t) {
  ordered_json j;
  j["allocated"] = t.allocated;
  j["defined"] = t.defined;
  j["valued"] = t.valued;
  j["value"] = t.value ? literal_to_json(*t.value) : ordered_json(nullptr);
  return j;
}

ordered_json outcome_to_json(const CallOutcome& o) {
  ordered_json j;
  j["function"] = o.function;
  j["kind"] = to_string(o.kind);
  if (o.kind == OutcomeKind::SpecError) j["number"] = o.error_number;
  if (o.kind == OutcomeKind::Exception) {
    auto codes = o.codes();
    j["code"] = to_string(codes.front());
    ordered_json all = ordered_json::array();
    for (auto c : codes) all.push_back(to_string(c));
    j["codes"] = std::move(all);
    ordered_json ex = ordered_json::array();
    for (const auto& x : o.exceptions)
      ex.push_back(ordered_json{{"code", to_string(x.code)}, {"subject", x.subject}, {"detail", x.detail}});
    j["exceptions"] = std::move(ex);
  }
  j["effects"] = o.displayed_effects;
  ordered_json deltas = ordered_json::array();
  for (const auto& d : o.deltas) {
    ordered_json dj;
    dj["element"] = d.element;
    dj["before"] = triple_to_json(d.before);
    dj["after"] = triple_to_json(d.after);
    deltas.push_back(std::move(dj));
  }
  j["deltas"] = std::move(deltas);
  j["state_after"] = o.state_after;
  return j;
}

ordered_json snapshot_to_json(const Snapshot& s, const std::string& level) {
  ordered_json j;
  j["state"] = s.state;
  j["level"] = level;
  ordered_json ind = ordered_json::array();
  for (const auto& [name, t] : s.indicators) {
    ordered_json e;
    e["element"] = name;
    auto tj = triple_to_json(t);
    for (auto& [k, v] : tj.items()) e[k] = v;
    ind.push_back(std::move(e));
  }
  j["indicators"] = std::move(ind);
  j["log_length"] = s.log_length;
  return j;
}

ordered_json record_to_json(const CallRecord& r) {
  ordered_json j;
  j["index"] = r.index;
  j["function"] = r.function;
  ordered_json args = ordered_json::object();
  for (const auto& [name, lit] : r.args) args[name] = literal_to_json(lit);
  j["args"] = std::move(args);
  j["outcome"] = outcome_to_json(r.outcome);
  return j;
}

ordered_json function_summary_json(const FunctionDef& f) {
  ordered_json j;
  j["name"] = f.name;
  j["type"] = f.ftype;
  j["level"] = f.level;
  j["states"] = f.valid_states;
  return j;
}

namespace {

ordered_json restriction_json(const Restriction& r) {
  return r.is_none() ? ordered_json(nullptr) : ordered_json(to_source(r));
}

ordered_json param_json(const ParameterDef& p) {
  ordered_json j;
  j["element"] = p.element;
  j["direction"] = to_string(p.direction);
  j["locality"] = to_string(p.locality);
  j["restriction"] = restriction_json(p.restriction);
  j["bundle"] = p.bundle.empty() ? ordered_json(nullptr) : ordered_json(p.bundle);
  return j;
}

ordered_json clauses_json(const std::vector<Clause>& cs) {
  ordered_json a = ordered_json::array();
  for (const auto& c : cs) a.push_back(clause_json(c));
  return a;
}

ordered_json flags_json(const Flags& f) {
  ordered_json a = ordered_json::array();
  if (f.allocated) a.push_back("allocated");
  if (f.defined) a.push_back("defined");
  return a;
}

}  // namespace

ordered_json clause_json(const Clause& c) {
  ordered_json j;
  if (const auto* r = std::get_if<RequiresClause>(&c.body)) {
    j["kind"] = "requires";
    j["element"] = r->element;
    j["flags"] = flags_json(r->flags);
    if (r->condition.kind == ValueCondition::Kind::Known) j["value"] = "known";
    if (r->condition.kind == ValueCondition::Kind::Equals) j["value"] = literal_to_json(r->condition.literal);
  } else if (const auto* s = std::get_if<SetsClause>(&c.body)) {
    j["kind"] = "sets";
    j["element"] = s->element;
    j["flags"] = flags_json(s->flags);
    if (s->value) j["value"] = literal_to_json(*s->value);
  } else if (const auto* w = std::get_if<WhenClause>(&c.body)) {
    j["kind"] = "when";
    j["element"] = w->element;
    j["relation"] = w->relation == Relation::Equal ? "=" : "!=";
    j["operand"] = literal_to_json(w->operand);
    j["then"] = clauses_json(w->then_branch);
    j["else"] = clauses_json(w->else_branch);
  } else if (const auto* on = std::get_if<OnErrorClause>(&c.body)) {
    j["kind"] = "onerror";
    j["numbers"] = on->numbers;
  }
  return j;
}

ordered_json function_detail_json(const SpecDb& db, const FunctionDef& f) {
  ordered_json j = function_summary_json(f);
  ordered_json params = ordered_json::array();
  for (const auto& p : f.params) params.push_back(param_json(p));
  j["params"] = std::move(params);
  ordered_json effects = ordered_json::array();
  for (const auto& e : f.effects) {
    ordered_json ej;
    ej["class"] = to_string(e.cls);
    ej["text"] = e.text;
    ej["clauses"] = clauses_json(e.clauses);
    effects.push_back(std::move(ej));
  }
  j["effects"] = std::move(effects);
  ordered_json errors = ordered_json::array();
  for (auto n : f.declared_errors) {
    const auto* e = db.find_error(n);
    errors.push_back(ordered_json{{"number", n}, {"text", e ? ordered_json(e->text) : ordered_json(nullptr)}});
  }
  j["errors"] = std::move(errors);
  j["references"] = f.references;
  return j;
}

ordered_json element_json(const DataElementDef& e) {
  ordered_json j;
  j["name"] = e.name;
  j["dtype"] = to_string(e.dtype);
  j["restriction"] = restriction_json(e.restriction);
  j["initial"] = e.initial ? literal_to_json(*e.initial) : ordered_json(nullptr);
  return j;
}

std::string dump(const ordered_json& j) { return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace); }

}  // namespace svsp
