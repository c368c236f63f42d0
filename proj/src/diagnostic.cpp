#include "svsp/diagnostic.hpp"

#include <algorithm>
#include <tuple>

namespace svsp {

const char* to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

Diagnostic make_diagnostic(std::string code, SourceLocation location, std::string subject, std::string message,
                           std::vector<std::string> related) {
  Diagnostic d;
  d.severity = (!code.empty() && code.front() == 'W') ? Severity::Warning : Severity::Error;
  d.code = std::move(code);
  d.location = std::move(location);
  d.subject = std::move(subject);
  d.message = std::move(message);
  d.related = std::move(related);
  return d;
}

bool diagnostic_less(const Diagnostic& a, const Diagnostic& b) {
  return std::tie(a.code, a.subject, a.location, a.message) < std::tie(b.code, b.subject, b.location, b.message);
}

void sort_diagnostics(std::vector<Diagnostic>& diags) { std::stable_sort(diags.begin(), diags.end(), diagnostic_less); }

}  // namespace svsp
