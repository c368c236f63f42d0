#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svsp/lexer.hpp"
#include "svsp/model.hpp"

namespace svsp {

struct ParseResult {
  std::vector<Declaration> declarations;
  std::vector<ParseDiagnostic> diagnostics;
  std::size_t skipped_blocks = 0;  // declarations abandoned by error recovery
};

/// Parses SVS source. Any byte sequence is accepted; on a syntax error the
/// offending declaration is dropped and parsing resumes at the next
/// top-level keyword, so a single pass reports every malformed block.
ParseResult parse_source(std::string_view text, const std::string& file);

/// Canonical SVS text for `db`: declaration order, two-space indentation,
/// one blank line between declarations. Empty database gives "".
std::string serialize(const SpecDb& db);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);

struct LoadedSpec {
  SpecDb db;
  std::vector<ParseDiagnostic> parse_diagnostics;
};

/// Parses each file and concatenates the declarations in argument order.
/// Throws IoError if a file cannot be read.
LoadedSpec load_spec_files(const std::vector<std::string>& paths);

std::string format_parse_diagnostic(const ParseDiagnostic& d);

}  // namespace svsp
