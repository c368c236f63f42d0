#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "svsp/diagnostic.hpp"

namespace svsp {

// ---------------------------------------------------------------------------
// Types and values
// ---------------------------------------------------------------------------

enum class CoordSpace { WC, NDC, DC };

struct DataType {
  enum class Kind { Integer, Real, String, Name, State, Point, Enum, List, Queue, Table, Pair };

  Kind kind = Kind::Integer;
  CoordSpace space = CoordSpace::WC;  // Point only
  std::string enum_name;              // Enum only
  std::vector<DataType> args;         // List/Queue/Table: 1, Pair: 2

  static DataType scalar(Kind k) { return DataType{k, CoordSpace::WC, {}, {}}; }
  static DataType point(CoordSpace s) { return DataType{Kind::Point, s, {}, {}}; }
  static DataType enumeration(std::string name) { return DataType{Kind::Enum, CoordSpace::WC, std::move(name), {}}; }
  static DataType container(Kind k, DataType elem) { return DataType{k, CoordSpace::WC, {}, {std::move(elem)}}; }
  static DataType pair(DataType first, DataType second) {
    return DataType{Kind::Pair, CoordSpace::WC, {}, {std::move(first), std::move(second)}};
  }

  /// list/queue/table/pair: existence of the classification only, never a value.
  bool classification_only() const;
  /// Only integer, enum and state elements can carry a value during a scenario.
  bool storable() const;

  friend bool operator==(const DataType&, const DataType&) = default;
};

std::string to_string(const DataType& t);
const char* to_string(CoordSpace s);

struct Literal {
  enum class Kind { Integer, Real, Ident, String };

  Kind kind = Kind::Integer;
  std::int64_t integer = 0;
  double real = 0.0;
  std::string text;  // Ident and String

  static Literal of_int(std::int64_t v) { return Literal{Kind::Integer, v, 0.0, {}}; }
  static Literal of_real(double v) { return Literal{Kind::Real, 0, v, {}}; }
  static Literal of_ident(std::string s) { return Literal{Kind::Ident, 0, 0.0, std::move(s)}; }
  static Literal of_string(std::string s) { return Literal{Kind::String, 0, 0.0, std::move(s)}; }

  bool is_number() const { return kind == Kind::Integer || kind == Kind::Real; }

  friend bool operator==(const Literal&, const Literal&) = default;
};

/// Canonical source spelling: integers plain, reals always with a '.' or
/// exponent, identifiers bare, strings double-quoted and escaped.
std::string to_source(const Literal& lit);
std::string format_real(double v);
std::string quote(std::string_view s);

struct Restriction {
  enum class Kind { None, IntRange, RealRange, Membership };

  Kind kind = Kind::None;
  std::int64_t int_lo = 0, int_hi = 0;
  double real_lo = 0.0, real_hi = 0.0;
  std::vector<std::string> values;  // Membership, declaration order

  static Restriction none() { return {}; }
  static Restriction int_range(std::int64_t lo, std::int64_t hi) {
    Restriction r;
    r.kind = Kind::IntRange;
    r.int_lo = lo;
    r.int_hi = hi;
    return r;
  }
  static Restriction real_range(double lo, double hi) {
    Restriction r;
    r.kind = Kind::RealRange;
    r.real_lo = lo;
    r.real_hi = hi;
    return r;
  }
  static Restriction membership(std::vector<std::string> vals) {
    Restriction r;
    r.kind = Kind::Membership;
    r.values = std::move(vals);
    return r;
  }

  bool is_none() const { return kind == Kind::None; }
  /// True when `lit` is one of the values this restriction permits.
  bool admits(const Literal& lit) const;

  friend bool operator==(const Restriction&, const Restriction&) = default;
};

std::string to_source(const Restriction& r);

enum class Subsumption { Yes, No, Incompatible };

/// Does every value satisfying `inner` also satisfy `outer`?
/// Ranges are closed intervals compared exactly. Int ranges and real ranges
/// are distinct kinds, as are ranges and memberships.
Subsumption subsumes(const Restriction& inner, const Restriction& outer);

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

enum class Direction { In, Out };
enum class Locality { Internal, External };

const char* to_string(Direction d);
const char* to_string(Locality l);

struct DataElementDef {
  std::string name;
  DataType dtype;
  Restriction restriction;
  std::optional<Literal> initial;
  SourceLocation loc;
};

/// A parameter slot. In a function's declared list either `element` or
/// `bundle` is set; in the expanded list `element` is always set and
/// `bundle` names the bundle it came from, if any.
struct ParameterDef {
  std::string element;
  Direction direction = Direction::In;
  Locality locality = Locality::Internal;
  Restriction restriction;
  std::string bundle;
  SourceLocation loc;

  bool is_bundle_ref() const { return element.empty() && !bundle.empty(); }
};

struct Flags {
  bool allocated = false;
  bool defined = false;
};

struct ValueCondition {
  enum class Kind { None, Known, Equals };
  Kind kind = Kind::None;
  Literal literal;
};

enum class Relation { Equal, NotEqual };

struct Clause;

struct RequiresClause {
  std::string element;
  Flags flags;
  ValueCondition condition;
};

struct SetsClause {
  std::string element;
  Flags flags;
  std::optional<Literal> value;
};

struct WhenClause {
  std::string element;
  Relation relation = Relation::Equal;
  Literal operand;
  std::vector<Clause> then_branch;
  std::vector<Clause> else_branch;
};

/// At effect top level: the error numbers the effect may report. Inside a
/// `when` branch: reaching it ends the call with the first listed number.
struct OnErrorClause {
  std::vector<std::int64_t> numbers;
};

struct Clause {
  std::variant<RequiresClause, SetsClause, WhenClause, OnErrorClause> body;
  SourceLocation loc;
};

enum class EffectClass { Init, Transform, Test, TestTransform, Unclassified };

const char* to_string(EffectClass c);
std::optional<EffectClass> effect_class_from(std::string_view s);

struct EffectDef {
  EffectClass cls = EffectClass::Unclassified;
  std::string text;
  std::vector<Clause> clauses;
  SourceLocation loc;
};

struct FunctionDef {
  std::string name;
  std::string ftype;
  std::string level;                      // empty: available at every level
  std::vector<std::string> valid_states;  // empty: callable in every state
  std::vector<ParameterDef> declared_params;
  std::vector<ParameterDef> params;  // bundle references expanded
  std::vector<EffectDef> effects;
  std::vector<std::string> references;
  std::vector<std::int64_t> declared_errors;  // every onerror number, first-appearance order
  SourceLocation loc;

  const ParameterDef* find_param(std::string_view element) const;
};

struct BundleDef {
  std::string name;
  std::vector<std::string> members;
  SourceLocation loc;
};

struct GroupDef {
  std::string name;
  std::vector<std::string> members;
  SourceLocation loc;
};

struct ErrorDef {
  std::int64_t number = 0;
  std::string text;
  SourceLocation loc;
};

struct EnumDef {
  std::string name;
  std::vector<std::string> values;
  SourceLocation loc;
};

struct StatesDecl {
  std::vector<std::string> values;
  std::string initial;
  SourceLocation loc;
  SourceLocation initial_loc;
};

struct LevelsDecl {
  std::vector<std::string> values;
  SourceLocation loc;
};

using Declaration =
    std::variant<StatesDecl, LevelsDecl, ErrorDef, EnumDef, DataElementDef, BundleDef, FunctionDef, GroupDef>;

// ---------------------------------------------------------------------------
// Specification database
// ---------------------------------------------------------------------------

enum class DeclKind { States, Levels, Error, Enum, Data, Bundle, Function, Group };

struct DeclRef {
  DeclKind kind;
  std::size_t index;  // into the matching table; unused for States/Levels

  friend bool operator==(const DeclRef&, const DeclRef&) = default;
};

class SpecDb;

/// Builds the symbol tables. Never fails: duplicates are indexed first-wins
/// and reported (E001-E004); dangling references are kept for the checker.
SpecDb build_spec_db(std::vector<Declaration> decls);

/// Immutable after construction; safe to share between threads.
class SpecDb {
 public:
  SpecDb() = default;

  const std::vector<std::string>& states() const { return states_; }
  const std::string& initial_state() const { return initial_state_; }
  const SourceLocation& states_location() const { return states_loc_; }
  const SourceLocation& initial_state_location() const { return initial_state_loc_; }
  bool has_states_decl() const { return has_states_; }
  const std::vector<std::string>& levels() const { return levels_; }
  bool has_levels_decl() const { return has_levels_; }
  const std::vector<EnumDef>& enums() const { return enums_; }
  const std::vector<DataElementDef>& data_elements() const { return elements_; }
  const std::vector<BundleDef>& bundles() const { return bundles_; }
  const std::vector<FunctionDef>& functions() const { return functions_; }
  const std::vector<GroupDef>& groups() const { return groups_; }
  const std::vector<ErrorDef>& errors() const { return errors_; }
  const std::vector<DeclRef>& declaration_order() const { return order_; }
  const std::vector<Diagnostic>& build_diagnostics() const { return build_diags_; }

  const DataElementDef* find_element(std::string_view name) const;
  const FunctionDef* find_function(std::string_view name) const;
  const BundleDef* find_bundle(std::string_view name) const;
  const GroupDef* find_group(std::string_view name) const;
  const ErrorDef* find_error(std::int64_t number) const;
  const EnumDef* find_enum(std::string_view name) const;

  std::optional<std::size_t> element_index(std::string_view name) const;
  std::optional<std::size_t> state_index(std::string_view name) const;
  std::optional<std::size_t> level_index(std::string_view name) const;

  /// The unique element of kind `state`; null when there is none or several.
  const DataElementDef* state_element() const;

  /// Values an element's literals may take, or nullopt if unconstrained:
  /// membership restriction, else the enum's values, else declared states.
  std::optional<std::vector<std::string>> value_domain(const DataElementDef& e) const;

  bool empty() const { return order_.empty(); }

 private:
  friend SpecDb build_spec_db(std::vector<Declaration> decls);

  std::vector<std::string> states_;
  std::string initial_state_;
  SourceLocation states_loc_, initial_state_loc_;
  bool has_states_ = false;
  std::vector<std::string> levels_;
  bool has_levels_ = false;
  std::vector<EnumDef> enums_;
  std::vector<DataElementDef> elements_;
  std::vector<BundleDef> bundles_;
  std::vector<FunctionDef> functions_;
  std::vector<GroupDef> groups_;
  std::vector<ErrorDef> errors_;
  std::vector<DeclRef> order_;
  std::vector<Diagnostic> build_diags_;

  std::map<std::string, std::size_t, std::less<>> element_ix_, function_ix_, bundle_ix_, group_ix_, enum_ix_,
      state_ix_, level_ix_;
  std::map<std::int64_t, std::size_t> error_ix_;
};

struct BundleExpansion {
  std::vector<ParameterDef> params;
  std::optional<Diagnostic> diagnostic;  // W013 when the bundle is unknown
};

BundleExpansion expand_bundle(const SpecDb& db, std::string_view bundle, Direction direction, Locality locality,
                              const SourceLocation& use_site = {});

struct GroupExpansion {
  std::vector<const FunctionDef*> functions;  // resolvable prefix
  bool complete = true;
  std::vector<Diagnostic> diagnostics;  // W013 for the first unresolved member
};

GroupExpansion expand_group(const SpecDb& db, std::string_view group);

}  // namespace svsp
