#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svsp/diagnostic.hpp"

namespace svsp {

struct ParseDiagnostic {
  SourceLocation location;
  std::string message;
  std::optional<std::string> expected;
};

struct Token {
  enum class Kind { Ident, Int, Real, String, LBrace, RBrace, Colon, DotDot, Equal, NotEqual, Comma, End, Invalid };

  Kind kind = Kind::End;
  std::string text;  // identifier spelling, decoded string body, or raw number/punctuation
  std::int64_t integer = 0;
  double real = 0.0;
  SourceLocation loc;

  bool is(Kind k) const { return kind == k; }
  bool is_word(std::string_view w) const { return kind == Kind::Ident && text == w; }
};

std::string describe(const Token& t);

/// Splits `text` into tokens; `#` starts a comment running to end of line.
/// Lexical problems (bad UTF-8, unterminated strings, stray bytes) are
/// reported in `diags` and produce Invalid tokens; the stream always ends
/// with an End token.
std::vector<Token> tokenize(std::string_view text, const std::string& file, std::vector<ParseDiagnostic>& diags,
                            int first_line = 1);

/// Byte offset of the first malformed UTF-8 sequence, if any.
std::optional<std::size_t> find_invalid_utf8(std::string_view text);

}  // namespace svsp
