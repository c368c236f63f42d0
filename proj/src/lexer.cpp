#include "svsp/lexer.hpp"

#include <cctype>
#include <charconv>

namespace svsp {

std::string describe(const Token& t) {
  using K = Token::Kind;
  switch (t.kind) {
    case K::Ident:
      return "'" + t.text + "'";
    case K::Int:
    case K::Real:
      return "number " + t.text;
    case K::String:
      return "string \"" + t.text + "\"";
    case K::LBrace:
      return "'{'";
    case K::RBrace:
      return "'}'";
    case K::Colon:
      return "':'";
    case K::DotDot:
      return "'..'";
    case K::Equal:
      return "'='";
    case K::NotEqual:
      return "'!='";
    case K::Comma:
      return "','";
    case K::End:
      return "end of input";
    case K::Invalid:
      return "invalid token";
  }
  return "token";
}

std::optional<std::size_t> find_invalid_utf8(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > n) return i;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF))
      return i;
    i += len;
  }
  return std::nullopt;
}

namespace {

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file, std::vector<ParseDiagnostic>& diags, int first_line)
      : text_(text), file_(file), diags_(diags), line_(first_line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t = next();
      bool end = t.is(Token::Kind::End);
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  std::string_view text_;
  const std::string& file_;
  std::vector<ParseDiagnostic>& diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  SourceLocation here() const { return {file_, line_, col_}; }

  void error(SourceLocation at, std::string msg) { diags_.push_back({std::move(at), std::move(msg), std::nullopt}); }

  void skip_space() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
  static bool digit(char c) { return c >= '0' && c <= '9'; }

  Token make(Token::Kind k, SourceLocation at, std::string text = {}) {
    Token t;
    t.kind = k;
    t.loc = std::move(at);
    t.text = std::move(text);
    return t;
  }

  Token next() {
    SourceLocation at = here();
    if (eof()) return make(Token::Kind::End, at);
    char c = peek();
    if (ident_start(c)) {
      std::size_t start = pos_;
      while (!eof() && ident_char(peek())) advance();
      return make(Token::Kind::Ident, at, std::string(text_.substr(start, pos_ - start)));
    }
    if (digit(c) || (c == '-' && digit(peek(1)))) return number(at);
    if (c == '"') return string(at);
    auto punct = [&](Token::Kind k, int len) {
      std::string s(text_.substr(pos_, len));
      for (int i = 0; i < len; ++i) advance();
      return make(k, at, s);
    };
    switch (c) {
      case '{':
        return punct(Token::Kind::LBrace, 1);
      case '}':
        return punct(Token::Kind::RBrace, 1);
      case ':':
        return punct(Token::Kind::Colon, 1);
      case ',':
        return punct(Token::Kind::Comma, 1);
      case '=':
        return punct(Token::Kind::Equal, 1);
      case '.':
        if (peek(1) == '.') return punct(Token::Kind::DotDot, 2);
        break;
      case '!':
        if (peek(1) == '=') return punct(Token::Kind::NotEqual, 2);
        break;
      default:
        break;
    }
    // Consume one whole UTF-8 sequence so columns stay on character starts.
    std::size_t len = 1;
    auto uc = static_cast<unsigned char>(c);
    if ((uc & 0xE0) == 0xC0) len = 2;
    else if ((uc & 0xF0) == 0xE0) len = 3;
    else if ((uc & 0xF8) == 0xF0) len = 4;
    std::string raw;
    for (std::size_t i = 0; i < len && !eof(); ++i) {
      if (i > 0 && (static_cast<unsigned char>(peek()) & 0xC0) != 0x80) break;
      raw += peek();
      advance();
    }
    error(at, "unexpected character '" + raw + "'");
    return make(Token::Kind::Invalid, at, raw);
  }

  Token number(SourceLocation at) {
    std::size_t start = pos_;
    if (peek() == '-') advance();
    while (digit(peek())) advance();
    bool is_real = false;
    if (peek() == '.' && digit(peek(1))) {
      is_real = true;
      advance();
      while (digit(peek())) advance();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
      is_real = true;
      advance();
      if (peek() == '+' || peek() == '-') advance();
      while (digit(peek())) advance();
    }
    std::string raw(text_.substr(start, pos_ - start));
    Token t = make(is_real ? Token::Kind::Real : Token::Kind::Int, at, raw);
    const char* b = raw.data();
    const char* e = raw.data() + raw.size();
    std::from_chars_result r{};
    if (is_real)
      r = std::from_chars(b, e, t.real);
    else
      r = std::from_chars(b, e, t.integer);
    if (r.ec != std::errc{} || r.ptr != e) {
      error(at, "number out of range: " + raw);
      t.kind = Token::Kind::Invalid;
    }
    return t;
  }

  Token string(SourceLocation at) {
    advance();  // opening quote
    std::string body;
    for (;;) {
      if (eof() || peek() == '\n') {
        error(at, "unterminated string literal");
        return make(Token::Kind::Invalid, at, body);
      }
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        SourceLocation esc = here();
        advance();
        if (eof()) continue;
        char e = peek();
        advance();
        switch (e) {
          case '"':
            body += '"';
            break;
          case '\\':
            body += '\\';
            break;
          case 'n':
            body += '\n';
            break;
          case 't':
            body += '\t';
            break;
          default:
            error(esc, std::string("unknown escape sequence '\\") + e + "'");
            body += e;
        }
        continue;
      }
      body += c;
      advance();
    }
    return make(Token::Kind::String, at, std::move(body));
  }
};

SourceLocation location_of_offset(std::string_view text, std::size_t offset, const std::string& file, int first_line) {
  SourceLocation loc{file, first_line, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& file, std::vector<ParseDiagnostic>& diags,
                            int first_line) {
  if (auto bad = find_invalid_utf8(text)) {
    diags.push_back({location_of_offset(text, *bad, file, first_line),
                     "invalid UTF-8 at byte offset " + std::to_string(*bad), std::nullopt});
  }
  return Lexer(text, file, diags, first_line).run();
}

}  // namespace svsp
