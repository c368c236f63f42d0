#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "svsp/diagnostic.hpp"
#include "svsp/engine.hpp"
#include "svsp/model.hpp"
#include "svsp/scenario.hpp"

namespace svsp {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

enum class DiagFormat { Text, JsonLines };

/// Text: `CODE severity file:line:col "subject" <dash> message [related: …]`
/// per line (<dash> is U+2014) and a closing `N errors, M warnings` line.
/// JSON lines: one object per diagnostic with keys code, severity, file,
/// line, col, subject, message, related, in that order; no summary.
std::string render_diagnostics(const std::vector<Diagnostic>& diags, DiagFormat format, bool color = false);

ordered_json diagnostic_to_json(const Diagnostic& d);
Diagnostic diagnostic_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Listings and cross references
// ---------------------------------------------------------------------------

enum class ListingOrder { ByName, ByType, ByLevel, ByState, ByDeclaration };

/// Accepts the CLI spellings name, type, level, state and decl.
std::optional<ListingOrder> listing_order_from(std::string_view s);
const char* to_string(ListingOrder o);

struct ListingRow {
  std::string name;
  std::string type;
  std::string level;
  std::vector<std::string> states;

  friend bool operator==(const ListingRow&, const ListingRow&) = default;
};

struct Listing {
  ListingOrder ordering = ListingOrder::ByDeclaration;
  std::vector<ListingRow> rows;  // a permutation of all declared functions
};

/// Rows sorted by the ordering key with the name as tie-break. By state, a
/// function sorts under the earliest declared state it is valid in (a function
/// without a state list is valid in all of them).
Listing function_listing(const SpecDb& db, ListingOrder ordering);
std::string render_listing(const SpecDb& db, const Listing& listing);

struct ElementUse {
  std::string function;
  Direction direction;
  Locality locality;
  std::string bundle;  // non-empty when the parameter came from a bundle
};

struct EffectTouch {
  std::string function;
  std::size_t effect_index;
  EffectClass cls;
  std::string text;
  std::vector<std::string> clause_kinds;  // requires/sets/when, in walk order
};

struct CrossReference {
  std::string element;
  std::vector<ElementUse> uses;
  std::vector<EffectTouch> effects;
  std::vector<std::string> bundles;
};

/// Throws LookupError for an undeclared element.
CrossReference cross_reference(const SpecDb& db, std::string_view element);
std::string render_cross_reference(const CrossReference& x);

// ---------------------------------------------------------------------------
// Scenario output
// ---------------------------------------------------------------------------

std::string render_outcome(const CallOutcome& o, std::size_t ordinal);
std::string render_failure(const AssertionFailure& f);
std::string render_scenario(const ScenarioResult& r);
std::string render_snapshot(const Snapshot& s);

// ---------------------------------------------------------------------------
// JSON forms shared with the HTTP service
// ---------------------------------------------------------------------------

ordered_json literal_to_json(const Literal& l);
ordered_json triple_to_json(const IndicatorTriple& t);
ordered_json outcome_to_json(const CallOutcome& o);
ordered_json snapshot_to_json(const Snapshot& s, const std::string& level);
ordered_json record_to_json(const CallRecord& r);
ordered_json function_summary_json(const FunctionDef& f);
ordered_json function_detail_json(const SpecDb& db, const FunctionDef& f);
ordered_json element_json(const DataElementDef& e);
ordered_json clause_json(const Clause& c);

/// Serialized form used everywhere JSON leaves the process.
std::string dump(const ordered_json& j);

}  // namespace svsp
