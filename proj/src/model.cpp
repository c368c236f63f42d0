#include "svsp/model.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace svsp {

// ---------------------------------------------------------------------------
// DataType
// ---------------------------------------------------------------------------

bool DataType::classification_only() const {
  switch (kind) {
    case Kind::List:
    case Kind::Queue:
    case Kind::Table:
    case Kind::Pair:
      return true;
    default:
      return false;
  }
}

bool DataType::storable() const { return kind == Kind::Integer || kind == Kind::Enum || kind == Kind::State; }

const char* to_string(CoordSpace s) {
  switch (s) {
    case CoordSpace::WC:
      return "wc";
    case CoordSpace::NDC:
      return "ndc";
    case CoordSpace::DC:
      return "dc";
  }
  return "wc";
}

std::string to_string(const DataType& t) {
  using K = DataType::Kind;
  switch (t.kind) {
    case K::Integer:
      return "integer";
    case K::Real:
      return "real";
    case K::String:
      return "string";
    case K::Name:
      return "name";
    case K::State:
      return "state";
    case K::Point:
      return std::string("point ") + to_string(t.space);
    case K::Enum:
      return "enum " + t.enum_name;
    case K::List:
      return "list of " + to_string(t.args.at(0));
    case K::Queue:
      return "queue of " + to_string(t.args.at(0));
    case K::Table:
      return "table of " + to_string(t.args.at(0));
    case K::Pair:
      return "pair of " + to_string(t.args.at(0)) + " " + to_string(t.args.at(1));
  }
  return "integer";
}

// ---------------------------------------------------------------------------
// Literals and restrictions
// ---------------------------------------------------------------------------

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ec == std::errc{} ? end : buf);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string quote(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
  return out;
}

std::string to_source(const Literal& lit) {
  switch (lit.kind) {
    case Literal::Kind::Integer:
      return std::to_string(lit.integer);
    case Literal::Kind::Real:
      return format_real(lit.real);
    case Literal::Kind::Ident:
      return lit.text;
    case Literal::Kind::String:
      return quote(lit.text);
  }
  return {};
}

bool Restriction::admits(const Literal& lit) const {
  switch (kind) {
    case Kind::None:
      return true;
    case Kind::IntRange:
      return lit.kind == Literal::Kind::Integer && lit.integer >= int_lo && lit.integer <= int_hi;
    case Kind::RealRange: {
      if (!lit.is_number()) return false;
      double v = lit.kind == Literal::Kind::Integer ? static_cast<double>(lit.integer) : lit.real;
      return v >= real_lo && v <= real_hi;
    }
    case Kind::Membership:
      return (lit.kind == Literal::Kind::Ident || lit.kind == Literal::Kind::String) &&
             std::find(values.begin(), values.end(), lit.text) != values.end();
  }
  return false;
}

std::string to_source(const Restriction& r) {
  switch (r.kind) {
    case Restriction::Kind::None:
      return {};
    case Restriction::Kind::IntRange:
      return "range " + std::to_string(r.int_lo) + " .. " + std::to_string(r.int_hi);
    case Restriction::Kind::RealRange:
      return "range " + format_real(r.real_lo) + " .. " + format_real(r.real_hi);
    case Restriction::Kind::Membership: {
      std::string s = "in {";
      for (const auto& v : r.values) s += " " + v;
      return s + " }";
    }
  }
  return {};
}

Subsumption subsumes(const Restriction& inner, const Restriction& outer) {
  using K = Restriction::Kind;
  if (outer.kind == K::None) return Subsumption::Yes;
  if (inner.kind == K::None) return Subsumption::No;
  if (inner.kind != outer.kind) return Subsumption::Incompatible;
  auto yes = [](bool b) { return b ? Subsumption::Yes : Subsumption::No; };
  switch (inner.kind) {
    case K::IntRange:
      if (inner.int_lo > inner.int_hi) return Subsumption::Yes;
      return yes(inner.int_lo >= outer.int_lo && inner.int_hi <= outer.int_hi);
    case K::RealRange:
      if (inner.real_lo > inner.real_hi) return Subsumption::Yes;
      return yes(inner.real_lo >= outer.real_lo && inner.real_hi <= outer.real_hi);
    case K::Membership:
      return yes(std::all_of(inner.values.begin(), inner.values.end(), [&](const std::string& v) {
        return std::find(outer.values.begin(), outer.values.end(), v) != outer.values.end();
      }));
    case K::None:
      break;
  }
  return Subsumption::Incompatible;
}

// ---------------------------------------------------------------------------
// Enum spellings
// ---------------------------------------------------------------------------

const char* to_string(Direction d) { return d == Direction::In ? "in" : "out"; }
const char* to_string(Locality l) { return l == Locality::Internal ? "internal" : "external"; }

const char* to_string(EffectClass c) {
  switch (c) {
    case EffectClass::Init:
      return "init";
    case EffectClass::Transform:
      return "transform";
    case EffectClass::Test:
      return "test";
    case EffectClass::TestTransform:
      return "testtransform";
    case EffectClass::Unclassified:
      return "unclassified";
  }
  return "unclassified";
}

std::optional<EffectClass> effect_class_from(std::string_view s) {
  if (s == "init") return EffectClass::Init;
  if (s == "transform") return EffectClass::Transform;
  if (s == "test") return EffectClass::Test;
  if (s == "testtransform") return EffectClass::TestTransform;
  if (s == "unclassified") return EffectClass::Unclassified;
  return std::nullopt;
}

const ParameterDef* FunctionDef::find_param(std::string_view element) const {
  for (const auto& p : params)
    if (p.element == element) return &p;
  return nullptr;
}

// ---------------------------------------------------------------------------
// SpecDb lookups
// ---------------------------------------------------------------------------

namespace {

template <typename Table, typename Index>
auto lookup(const Table& table, const Index& ix, std::string_view name) -> decltype(&table.front()) {
  auto it = ix.find(name);
  return it == ix.end() ? nullptr : &table[it->second];
}

std::optional<std::size_t> index_of(const std::map<std::string, std::size_t, std::less<>>& ix,
                                    std::string_view name) {
  auto it = ix.find(name);
  if (it == ix.end()) return std::nullopt;
  return it->second;
}

}  // namespace

const DataElementDef* SpecDb::find_element(std::string_view name) const { return lookup(elements_, element_ix_, name); }
const FunctionDef* SpecDb::find_function(std::string_view name) const { return lookup(functions_, function_ix_, name); }
const BundleDef* SpecDb::find_bundle(std::string_view name) const { return lookup(bundles_, bundle_ix_, name); }
const GroupDef* SpecDb::find_group(std::string_view name) const { return lookup(groups_, group_ix_, name); }
const EnumDef* SpecDb::find_enum(std::string_view name) const { return lookup(enums_, enum_ix_, name); }

const ErrorDef* SpecDb::find_error(std::int64_t number) const {
  auto it = error_ix_.find(number);
  return it == error_ix_.end() ? nullptr : &errors_[it->second];
}

std::optional<std::size_t> SpecDb::element_index(std::string_view name) const { return index_of(element_ix_, name); }
std::optional<std::size_t> SpecDb::state_index(std::string_view name) const { return index_of(state_ix_, name); }
std::optional<std::size_t> SpecDb::level_index(std::string_view name) const { return index_of(level_ix_, name); }

const DataElementDef* SpecDb::state_element() const {
  const DataElementDef* found = nullptr;
  for (const auto& e : elements_) {
    if (e.dtype.kind != DataType::Kind::State) continue;
    if (found) return nullptr;
    found = &e;
  }
  return found;
}

std::optional<std::vector<std::string>> SpecDb::value_domain(const DataElementDef& e) const {
  if (e.restriction.kind == Restriction::Kind::Membership) return e.restriction.values;
  if (e.dtype.kind == DataType::Kind::Enum) {
    if (const auto* en = find_enum(e.dtype.enum_name)) return en->values;
    return std::nullopt;
  }
  if (e.dtype.kind == DataType::Kind::State) return states_;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace {

void collect_errors(const std::vector<Clause>& clauses, std::vector<std::int64_t>& out) {
  for (const auto& c : clauses) {
    if (const auto* on = std::get_if<OnErrorClause>(&c.body)) {
      for (auto n : on->numbers)
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    } else if (const auto* w = std::get_if<WhenClause>(&c.body)) {
      collect_errors(w->then_branch, out);
      collect_errors(w->else_branch, out);
    }
  }
}

// A range written with integer bounds on a real element is a real range.
Restriction coerce_for(const DataType& t, Restriction r) {
  if (t.kind == DataType::Kind::Real && r.kind == Restriction::Kind::IntRange)
    return Restriction::real_range(static_cast<double>(r.int_lo), static_cast<double>(r.int_hi));
  return r;
}

void check_membership_duplicates(const Restriction& r, const SourceLocation& loc, const std::string& owner,
                                 std::vector<Diagnostic>& diags) {
  if (r.kind != Restriction::Kind::Membership) return;
  std::set<std::string> seen;
  for (const auto& v : r.values)
    if (!seen.insert(v).second)
      diags.push_back(make_diagnostic("E004", loc, v, "enum value listed twice in the membership restriction of " +
                                                          quote(owner)));
}

}  // namespace

SpecDb build_spec_db(std::vector<Declaration> decls) {
  SpecDb db;
  auto& diags = db.build_diags_;

  auto add_names = [&](std::vector<std::string>& into, std::map<std::string, std::size_t, std::less<>>& ix,
                       const std::vector<std::string>& names, const SourceLocation& loc, const char* what) {
    for (const auto& n : names) {
      if (ix.count(n)) {
        diags.push_back(make_diagnostic("E004", loc, n, std::string("duplicate ") + what + " name"));
        continue;
      }
      ix.emplace(n, into.size());
      into.push_back(n);
    }
  };

  for (auto& decl : decls) {
    std::visit(
        [&](auto&& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, StatesDecl>) {
            if (!db.has_states_) {
              db.has_states_ = true;
              db.states_loc_ = d.loc;
              db.initial_state_ = d.initial;
              db.initial_state_loc_ = d.initial_loc;
              db.order_.push_back({DeclKind::States, 0});
            }
            add_names(db.states_, db.state_ix_, d.values, d.loc, "state");
          } else if constexpr (std::is_same_v<T, LevelsDecl>) {
            if (!db.has_levels_) {
              db.has_levels_ = true;
              db.order_.push_back({DeclKind::Levels, 0});
            }
            add_names(db.levels_, db.level_ix_, d.values, d.loc, "level");
          } else if constexpr (std::is_same_v<T, ErrorDef>) {
            if (db.error_ix_.count(d.number)) {
              diags.push_back(
                  make_diagnostic("E003", d.loc, std::to_string(d.number), "duplicate error number; first wins"));
              return;
            }
            db.error_ix_.emplace(d.number, db.errors_.size());
            db.order_.push_back({DeclKind::Error, db.errors_.size()});
            db.errors_.push_back(std::move(d));
          } else if constexpr (std::is_same_v<T, EnumDef>) {
            if (db.enum_ix_.count(d.name)) {
              diags.push_back(make_diagnostic("E004", d.loc, d.name, "duplicate enum type name; first wins"));
              return;
            }
            std::set<std::string> seen;
            for (const auto& v : d.values)
              if (!seen.insert(v).second)
                diags.push_back(make_diagnostic("E004", d.loc, v, "duplicate value in enum " + d.name));
            db.enum_ix_.emplace(d.name, db.enums_.size());
            db.order_.push_back({DeclKind::Enum, db.enums_.size()});
            db.enums_.push_back(std::move(d));
          } else if constexpr (std::is_same_v<T, DataElementDef>) {
            if (db.element_ix_.count(d.name) || db.bundle_ix_.count(d.name)) {
              diags.push_back(make_diagnostic("E002", d.loc, d.name, "duplicate data element name; first wins"));
              return;
            }
            d.restriction = coerce_for(d.dtype, std::move(d.restriction));
            check_membership_duplicates(d.restriction, d.loc, d.name, diags);
            db.element_ix_.emplace(d.name, db.elements_.size());
            db.order_.push_back({DeclKind::Data, db.elements_.size()});
            db.elements_.push_back(std::move(d));
          } else if constexpr (std::is_same_v<T, BundleDef>) {
            if (db.element_ix_.count(d.name) || db.bundle_ix_.count(d.name)) {
              diags.push_back(make_diagnostic("E002", d.loc, d.name,
                                              "bundle name already names a data element or bundle; first wins"));
              return;
            }
            db.bundle_ix_.emplace(d.name, db.bundles_.size());
            db.order_.push_back({DeclKind::Bundle, db.bundles_.size()});
            db.bundles_.push_back(std::move(d));
          } else if constexpr (std::is_same_v<T, FunctionDef>) {
            if (db.function_ix_.count(d.name) || db.group_ix_.count(d.name)) {
              diags.push_back(make_diagnostic("E001", d.loc, d.name, "duplicate function name; first wins"));
              return;
            }
            d.declared_errors.clear();
            for (const auto& e : d.effects) collect_errors(e.clauses, d.declared_errors);
            db.function_ix_.emplace(d.name, db.functions_.size());
            db.order_.push_back({DeclKind::Function, db.functions_.size()});
            db.functions_.push_back(std::move(d));
          } else if constexpr (std::is_same_v<T, GroupDef>) {
            if (db.function_ix_.count(d.name) || db.group_ix_.count(d.name)) {
              diags.push_back(make_diagnostic("E001", d.loc, d.name,
                                              "group name already names a function or group; first wins"));
              return;
            }
            db.group_ix_.emplace(d.name, db.groups_.size());
            db.order_.push_back({DeclKind::Group, db.groups_.size()});
            db.groups_.push_back(std::move(d));
          }
        },
        decl);
  }

  // Parameter lists need every bundle and element indexed first.
  for (auto& fn : db.functions_) {
    fn.params.clear();
    std::set<std::string> seen;
    auto push = [&](ParameterDef p) {
      if (const auto* el = db.find_element(p.element)) p.restriction = coerce_for(el->dtype, std::move(p.restriction));
      if (!seen.insert(p.element).second) {
        diags.push_back(make_diagnostic("E015", p.loc, p.element,
                                        "data element appears more than once in the parameter list of " +
                                            quote(fn.name) + "; a parameter is either input or output"));
        return;
      }
      check_membership_duplicates(p.restriction, p.loc, fn.name, diags);
      fn.params.push_back(std::move(p));
    };
    for (const auto& p : fn.declared_params) {
      if (!p.is_bundle_ref()) {
        push(p);
        continue;
      }
      // Unknown bundles are reported by the checker (W013).
      for (auto& member : expand_bundle(db, p.bundle, p.direction, p.locality, p.loc).params) push(std::move(member));
    }
  }
  return db;
}

BundleExpansion expand_bundle(const SpecDb& db, std::string_view bundle, Direction direction, Locality locality,
                              const SourceLocation& use_site) {
  BundleExpansion out;
  const auto* b = db.find_bundle(bundle);
  if (!b) {
    out.diagnostic = make_diagnostic("W013", use_site, std::string(bundle), "parameter names an undefined bundle");
    return out;
  }
  for (const auto& m : b->members) {
    ParameterDef p;
    p.element = m;
    p.direction = direction;
    p.locality = locality;
    p.bundle = b->name;
    p.loc = use_site;
    out.params.push_back(std::move(p));
  }
  return out;
}

GroupExpansion expand_group(const SpecDb& db, std::string_view group) {
  GroupExpansion out;
  const auto* g = db.find_group(group);
  if (!g) {
    out.complete = false;
    out.diagnostics.push_back(make_diagnostic("W013", {}, std::string(group), "undefined group"));
    return out;
  }
  for (const auto& m : g->members) {
    const auto* fn = db.find_function(m);
    if (!fn) {
      out.complete = false;
      out.diagnostics.push_back(make_diagnostic("W013", g->loc, m, "group " + quote(g->name) +
                                                                        " calls an undefined function"));
      break;
    }
    out.functions.push_back(fn);
  }
  return out;
}

}  // namespace svsp
