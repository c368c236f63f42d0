#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svsp/diagnostic.hpp"
#include "svsp/model.hpp"

namespace svsp {

/// The fixed check catalog. E-codes are errors and block scenario runs;
/// W-codes are completeness warnings.
///
///   E001 duplicate function (or group) name
///   E002 duplicate data element (or bundle) name
///   E003 duplicate error number
///   E004 duplicate state, level, enum type or enum value name
///   E005 parameter references an undefined data element
///   E006 effect clause names an element that is not a parameter of its function
///   E007 parameter restriction not contained in the element's restriction
///   E008 restriction kind incompatible with the element's data type
///   E009 onerror number missing from the error table
///   E010 undeclared state, level or enum type referenced
///   E014 value on an element whose type cannot hold one
///   E015 parameter direction discipline violated
///   E016 no usable designated state element
///   W011 data element in no parameter list
///   W012 function without effects
///   W013 bundle or group member (or parameter bundle) undefined
///   W017 literal outside the element's membership or range
struct CatalogEntry {
  std::string_view code;
  Severity severity;
  std::string_view summary;
};

const std::vector<CatalogEntry>& check_catalog();

/// Runs every catalog check, merges the build diagnostics, and returns the
/// result sorted by (code, subject, location). Deterministic.
std::vector<Diagnostic> run_all_checks(const SpecDb& db);

/// E007/E008 for one parameter against the element it references.
std::optional<Diagnostic> check_restriction_compatibility(const DataElementDef& element, const ParameterDef& param);

/// Data-element names within edit distance 2 of `missing` or sharing a whole
/// word with it, sorted by (distance, name).
std::vector<std::string> suggest_similar_names(std::string_view missing, const SpecDb& db);

std::size_t edit_distance(std::string_view a, std::string_view b);

std::size_t count_errors(const std::vector<Diagnostic>& diags);
std::size_t count_warnings(const std::vector<Diagnostic>& diags);

/// Copy of `diags` with every warning promoted to an error.
std::vector<Diagnostic> promote_warnings(std::vector<Diagnostic> diags);

/// Can `lit` be stored in an element of type `t`? (integer, enum and state only)
bool literal_fits_type(const DataType& t, const Literal& lit);

}  // namespace svsp
