#pragma once

#include <compare>
#include <string>
#include <vector>

namespace svsp {

struct SourceLocation {
  std::string file;
  int line = 1;    // 1-based
  int column = 1;  // 1-based, counted in bytes

  friend auto operator<=>(const SourceLocation&, const SourceLocation&) = default;
};

enum class Severity { Error, Warning };

const char* to_string(Severity s);

/// One static-check finding. `code` is drawn from the fixed catalog in
/// checker.hpp; the severity follows from the code's first letter.
struct Diagnostic {
  std::string code;
  Severity severity = Severity::Error;
  SourceLocation location;
  std::string subject;
  std::string message;
  std::vector<std::string> related;
};

Diagnostic make_diagnostic(std::string code, SourceLocation location,
                           std::string subject, std::string message,
                           std::vector<std::string> related = {});

/// Orders by (code, subject, location), then message so that sorting is total.
bool diagnostic_less(const Diagnostic& a, const Diagnostic& b);

void sort_diagnostics(std::vector<Diagnostic>& diags);

}  // namespace svsp
