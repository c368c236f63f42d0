#include "svsp/parser.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

namespace svsp {

namespace {

constexpr std::array<std::string_view, 8> kTopLevel = {"states", "levels", "error", "enum",
                                                       "data",   "bundle", "function", "group"};

bool is_top_level_keyword(const Token& t) {
  return t.is(Token::Kind::Ident) && std::find(kTopLevel.begin(), kTopLevel.end(), t.text) != kTopLevel.end();
}

struct SyntaxError {
  SourceLocation loc;
  std::string message;
  std::optional<std::string> expected;
  std::size_t token_index;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  void run(ParseResult& out) {
    while (!cur().is(Token::Kind::End)) {
      if (!is_top_level_keyword(cur())) {
        out.diagnostics.push_back({cur().loc, "expected a declaration, found " + describe(cur()),
                                   std::string("declaration keyword")});
        recover(pos_, pos_);
        continue;
      }
      std::size_t start = pos_;
      try {
        out.declarations.push_back(declaration());
      } catch (const SyntaxError& e) {
        out.diagnostics.push_back({e.loc, e.message, e.expected});
        ++out.skipped_blocks;
        recover(start + 1, e.token_index);
      }
    }
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (!t.is(Token::Kind::End)) ++pos_;
    return t;
  }

  [[noreturn]] void fail(std::string message, std::optional<std::string> expected = std::nullopt) const {
    throw SyntaxError{cur().loc, std::move(message), std::move(expected), pos_};
  }

  [[noreturn]] void fail_expected(const std::string& what) const {
    fail("expected " + what + ", found " + describe(cur()), what);
  }

  // Resume at the first top-level keyword at brace depth 0, counting depth
  // from `from` and never resuming before `error_at`.
  void recover(std::size_t from, std::size_t error_at) {
    int depth = 0;
    std::size_t i = from;
    for (; i < error_at && i < toks_.size(); ++i) {
      if (toks_[i].is(Token::Kind::LBrace)) ++depth;
      else if (toks_[i].is(Token::Kind::RBrace) && depth > 0) --depth;
    }
    for (; i < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.is(Token::Kind::End)) break;
      if (depth == 0 && is_top_level_keyword(t) && i >= from) break;
      if (t.is(Token::Kind::LBrace)) ++depth;
      else if (t.is(Token::Kind::RBrace) && depth > 0) --depth;
    }
    pos_ = std::min(i, toks_.size() - 1);
  }

  void expect(Token::Kind k, const std::string& what) {
    if (!cur().is(k)) fail_expected(what);
    take();
  }

  void expect_word(std::string_view w) {
    if (!cur().is_word(w)) fail_expected("'" + std::string(w) + "'");
    take();
  }

  std::string ident(const std::string& what = "identifier") {
    if (!cur().is(Token::Kind::Ident) || is_top_level_keyword(cur())) fail_expected(what);
    return take().text;
  }

  std::string string_lit(const std::string& what = "quoted name") {
    if (!cur().is(Token::Kind::String)) fail_expected(what);
    return take().text;
  }

  std::int64_t int_lit() {
    if (!cur().is(Token::Kind::Int)) fail_expected("integer");
    return take().integer;
  }

  // IDENT+ "}" after an opening brace has been consumed.
  std::vector<std::string> ident_list(const std::string& what) {
    std::vector<std::string> out;
    while (!cur().is(Token::Kind::RBrace)) {
      if (cur().is(Token::Kind::End)) fail_expected("'}'");
      out.push_back(ident(what));
    }
    if (out.empty()) fail_expected(what);
    take();
    return out;
  }

  std::vector<std::string> string_list_in_braces(const std::string& what) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    while (!cur().is(Token::Kind::RBrace)) {
      if (cur().is(Token::Kind::End)) fail_expected("'}'");
      SourceLocation at = cur().loc;
      std::size_t at_ix = pos_;
      std::string s = string_lit(what);
      if (!seen.insert(s).second) throw SyntaxError{at, "member " + quote(s) + " listed twice", std::nullopt, at_ix};
      out.push_back(std::move(s));
    }
    if (out.empty()) fail_expected(what);
    take();
    return out;
  }

  Literal literal() {
    const Token& t = cur();
    switch (t.kind) {
      case Token::Kind::Int:
        return Literal::of_int(take().integer);
      case Token::Kind::Real:
        return Literal::of_real(take().real);
      case Token::Kind::String:
        return Literal::of_string(take().text);
      case Token::Kind::Ident:
        if (!is_top_level_keyword(t)) return Literal::of_ident(take().text);
        break;
      default:
        break;
    }
    fail_expected("literal");
  }

  Declaration declaration() {
    const Token& kw = cur();
    SourceLocation loc = kw.loc;
    std::string word = kw.text;
    take();
    if (word == "states") return states(loc);
    if (word == "levels") return levels(loc);
    if (word == "error") return error(loc);
    if (word == "enum") return enum_decl(loc);
    if (word == "data") return data(loc);
    if (word == "bundle") return bundle(loc);
    if (word == "function") return function(loc);
    return group(loc);
  }

  StatesDecl states(SourceLocation loc) {
    StatesDecl d;
    d.loc = loc;
    expect(Token::Kind::LBrace, "'{'");
    d.values = ident_list("state name");
    expect_word("initial");
    d.initial_loc = cur().loc;
    d.initial = ident("initial state name");
    return d;
  }

  LevelsDecl levels(SourceLocation loc) {
    LevelsDecl d;
    d.loc = loc;
    expect(Token::Kind::LBrace, "'{'");
    d.values = ident_list("level name");
    return d;
  }

  ErrorDef error(SourceLocation loc) {
    ErrorDef d;
    d.loc = loc;
    d.number = int_lit();
    d.text = string_lit("error text");
    return d;
  }

  EnumDef enum_decl(SourceLocation loc) {
    EnumDef d;
    d.loc = loc;
    d.name = ident("enum type name");
    expect(Token::Kind::LBrace, "'{'");
    d.values = ident_list("enum value");
    return d;
  }

  DataType typeref() {
    using K = DataType::Kind;
    if (!cur().is(Token::Kind::Ident)) fail_expected("type");
    std::string w = cur().text;
    if (w == "integer") return take(), DataType::scalar(K::Integer);
    if (w == "real") return take(), DataType::scalar(K::Real);
    if (w == "string") return take(), DataType::scalar(K::String);
    if (w == "name") return take(), DataType::scalar(K::Name);
    if (w == "state") return take(), DataType::scalar(K::State);
    if (w == "point") {
      take();
      if (cur().is_word("wc")) return take(), DataType::point(CoordSpace::WC);
      if (cur().is_word("ndc")) return take(), DataType::point(CoordSpace::NDC);
      if (cur().is_word("dc")) return take(), DataType::point(CoordSpace::DC);
      fail_expected("coordinate space (wc, ndc or dc)");
    }
    if (w == "enum") {
      take();
      return DataType::enumeration(ident("enum type name"));
    }
    if (w == "list" || w == "queue" || w == "table") {
      take();
      expect_word("of");
      K k = w == "list" ? K::List : (w == "queue" ? K::Queue : K::Table);
      return DataType::container(k, typeref());
    }
    if (w == "pair") {
      take();
      expect_word("of");
      DataType first = typeref();
      DataType second = typeref();
      return DataType::pair(std::move(first), std::move(second));
    }
    fail_expected("type");
  }

  bool at_restriction() const { return cur().is_word("range") || cur().is_word("in"); }

  Restriction restriction() {
    if (cur().is_word("in")) {
      take();
      expect(Token::Kind::LBrace, "'{'");
      return Restriction::membership(ident_list("enum value"));
    }
    expect_word("range");
    const Token lo = cur();
    if (!lo.is(Token::Kind::Int) && !lo.is(Token::Kind::Real)) fail_expected("number");
    take();
    expect(Token::Kind::DotDot, "'..'");
    const Token hi = cur();
    if (!hi.is(Token::Kind::Int) && !hi.is(Token::Kind::Real)) fail_expected("number");
    std::size_t hi_ix = pos_;
    take();
    if (lo.is(Token::Kind::Int) && hi.is(Token::Kind::Int)) {
      if (lo.integer > hi.integer) throw SyntaxError{lo.loc, "empty range: lower bound exceeds upper bound", std::nullopt, hi_ix};
      return Restriction::int_range(lo.integer, hi.integer);
    }
    double l = lo.is(Token::Kind::Int) ? static_cast<double>(lo.integer) : lo.real;
    double h = hi.is(Token::Kind::Int) ? static_cast<double>(hi.integer) : hi.real;
    if (l > h) throw SyntaxError{lo.loc, "empty range: lower bound exceeds upper bound", std::nullopt, hi_ix};
    return Restriction::real_range(l, h);
  }

  DataElementDef data(SourceLocation loc) {
    DataElementDef d;
    d.loc = loc;
    d.name = string_lit("data element name");
    expect(Token::Kind::Colon, "':'");
    d.dtype = typeref();
    if (at_restriction()) d.restriction = restriction();
    if (cur().is_word("init")) {
      take();
      d.initial = literal();
    }
    return d;
  }

  BundleDef bundle(SourceLocation loc) {
    BundleDef d;
    d.loc = loc;
    d.name = string_lit("bundle name");
    expect(Token::Kind::LBrace, "'{'");
    d.members = string_list_in_braces("data element name");
    return d;
  }

  GroupDef group(SourceLocation loc) {
    GroupDef d;
    d.loc = loc;
    d.name = string_lit("group name");
    expect(Token::Kind::LBrace, "'{'");
    expect_word("calls");
    d.members = string_list_in_braces("function name");
    return d;
  }

  FunctionDef function(SourceLocation loc) {
    FunctionDef f;
    f.loc = loc;
    f.name = string_lit("function name");
    expect(Token::Kind::LBrace, "'{'");
    bool have_type = false, have_level = false, have_states = false;
    auto once = [&](bool& flag, const char* what) {
      if (flag) fail(std::string("duplicate '") + what + "' in function " + quote(f.name));
      flag = true;
    };
    for (;;) {
      const Token& t = cur();
      if (t.is(Token::Kind::RBrace)) {
        take();
        break;
      }
      if (t.is(Token::Kind::End)) fail("unexpected end of input in function " + quote(f.name), "}");
      if (t.is_word("type")) {
        once(have_type, "type");
        take();
        f.ftype = ident("function type");
      } else if (t.is_word("level")) {
        once(have_level, "level");
        take();
        f.level = ident("level name");
      } else if (t.is_word("states")) {
        once(have_states, "states");
        take();
        expect(Token::Kind::LBrace, "'{'");
        f.valid_states = ident_list("state name");
      } else if (t.is_word("param")) {
        f.declared_params.push_back(param());
      } else if (t.is_word("effect")) {
        f.effects.push_back(effect());
      } else if (t.is_word("references")) {
        take();
        if (!cur().is(Token::Kind::String)) fail_expected("reference string");
        while (cur().is(Token::Kind::String)) f.references.push_back(take().text);
      } else {
        fail("unexpected " + describe(t) + " in function body",
             "'type', 'level', 'states', 'param', 'effect', 'references' or '}'");
      }
    }
    return f;
  }

  ParameterDef param() {
    ParameterDef p;
    p.loc = cur().loc;
    take();
    if (cur().is_word("in")) p.direction = Direction::In;
    else if (cur().is_word("out")) p.direction = Direction::Out;
    else fail_expected("'in' or 'out'");
    take();
    if (cur().is_word("internal")) p.locality = Locality::Internal;
    else if (cur().is_word("external")) p.locality = Locality::External;
    else fail_expected("'internal' or 'external'");
    take();
    if (cur().is_word("bundle")) {
      take();
      p.bundle = string_lit("bundle name");
      return p;
    }
    p.element = string_lit("data element name or 'bundle'");
    if (at_restriction()) p.restriction = restriction();
    return p;
  }

  EffectDef effect() {
    EffectDef e;
    e.loc = cur().loc;
    take();
    if (!cur().is(Token::Kind::Ident)) fail_expected("effect class");
    auto cls = effect_class_from(cur().text);
    if (!cls) fail_expected("effect class (init, transform, test, testtransform or unclassified)");
    take();
    e.cls = *cls;
    e.text = string_lit("effect text");
    expect(Token::Kind::LBrace, "'{'");
    e.clauses = clause_block();
    return e;
  }

  // clause* "}" after an opening brace has been consumed.
  std::vector<Clause> clause_block() {
    std::vector<Clause> out;
    for (;;) {
      if (cur().is(Token::Kind::RBrace)) {
        take();
        return out;
      }
      if (cur().is(Token::Kind::End)) fail("unexpected end of input in clause block", "}");
      out.push_back(clause());
    }
  }

  Flags flags() {
    Flags f;
    for (;;) {
      if (cur().is_word("allocated")) {
        take();
        f.allocated = true;
      } else if (cur().is_word("defined")) {
        take();
        f.defined = true;
      } else {
        return f;
      }
    }
  }

  Clause clause() {
    Clause c;
    c.loc = cur().loc;
    const Token& t = cur();
    if (t.is_word("requires")) {
      take();
      RequiresClause r;
      r.element = string_lit("data element name");
      expect(Token::Kind::LBrace, "'{'");
      r.flags = flags();
      if (cur().is_word("value")) {
        take();
        if (cur().is_word("known")) {
          take();
          r.condition.kind = ValueCondition::Kind::Known;
        } else {
          expect(Token::Kind::Equal, "'known' or '='");
          r.condition.kind = ValueCondition::Kind::Equals;
          r.condition.literal = literal();
        }
      }
      expect(Token::Kind::RBrace, "'}'");
      c.body = std::move(r);
    } else if (t.is_word("sets")) {
      take();
      SetsClause s;
      s.element = string_lit("data element name");
      expect(Token::Kind::LBrace, "'{'");
      s.flags = flags();
      if (cur().is_word("value")) {
        take();
        expect(Token::Kind::Equal, "'='");
        s.value = literal();
      }
      expect(Token::Kind::RBrace, "'}'");
      c.body = std::move(s);
    } else if (t.is_word("when")) {
      take();
      WhenClause w;
      w.element = string_lit("data element name");
      if (cur().is(Token::Kind::Equal)) w.relation = Relation::Equal;
      else if (cur().is(Token::Kind::NotEqual)) w.relation = Relation::NotEqual;
      else fail_expected("'=' or '!='");
      take();
      w.operand = literal();
      expect(Token::Kind::LBrace, "'{'");
      w.then_branch = clause_block();
      if (cur().is_word("else")) {
        take();
        expect(Token::Kind::LBrace, "'{'");
        w.else_branch = clause_block();
      }
      c.body = std::move(w);
    } else if (t.is_word("onerror")) {
      take();
      OnErrorClause o;
      if (!cur().is(Token::Kind::Int)) fail_expected("error number");
      while (cur().is(Token::Kind::Int)) o.numbers.push_back(take().integer);
      c.body = std::move(o);
    } else {
      fail("unexpected " + describe(t) + " in effect", "'requires', 'sets', 'when', 'onerror' or '}'");
    }
    return c;
  }
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string flag_text(const Flags& f) {
  std::string s;
  if (f.allocated) s += " allocated";
  if (f.defined) s += " defined";
  return s;
}

void write_clauses(std::ostringstream& os, const std::vector<Clause>& clauses, int indent);

void write_clause(std::ostringstream& os, const Clause& c, int indent) {
  std::string pad(indent, ' ');
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, RequiresClause>) {
          os << pad << "requires " << quote(b.element) << " {" << flag_text(b.flags);
          if (b.condition.kind == ValueCondition::Kind::Known) os << " value known";
          if (b.condition.kind == ValueCondition::Kind::Equals) os << " value = " << to_source(b.condition.literal);
          os << " }\n";
        } else if constexpr (std::is_same_v<T, SetsClause>) {
          os << pad << "sets " << quote(b.element) << " {" << flag_text(b.flags);
          if (b.value) os << " value = " << to_source(*b.value);
          os << " }\n";
        } else if constexpr (std::is_same_v<T, WhenClause>) {
          os << pad << "when " << quote(b.element) << (b.relation == Relation::Equal ? " = " : " != ")
             << to_source(b.operand) << " {\n";
          write_clauses(os, b.then_branch, indent + 2);
          os << pad << "}";
          if (!b.else_branch.empty()) {
            os << " else {\n";
            write_clauses(os, b.else_branch, indent + 2);
            os << pad << "}";
          }
          os << "\n";
        } else {
          os << pad << "onerror";
          for (auto n : b.numbers) os << ' ' << n;
          os << "\n";
        }
      },
      c.body);
}

void write_clauses(std::ostringstream& os, const std::vector<Clause>& clauses, int indent) {
  for (const auto& c : clauses) write_clause(os, c, indent);
}

void write_ident_block(std::ostringstream& os, const std::vector<std::string>& ids) {
  os << "{";
  for (const auto& s : ids) os << ' ' << s;
  os << " }";
}

void write_function(std::ostringstream& os, const FunctionDef& f) {
  os << "function " << quote(f.name) << " {\n";
  if (!f.ftype.empty()) os << "  type " << f.ftype << "\n";
  if (!f.level.empty()) os << "  level " << f.level << "\n";
  if (!f.valid_states.empty()) {
    os << "  states ";
    write_ident_block(os, f.valid_states);
    os << "\n";
  }
  for (const auto& p : f.declared_params) {
    os << "  param " << to_string(p.direction) << ' ' << to_string(p.locality) << ' ';
    if (p.is_bundle_ref()) {
      os << "bundle " << quote(p.bundle);
    } else {
      os << quote(p.element);
      if (!p.restriction.is_none()) os << ' ' << to_source(p.restriction);
    }
    os << "\n";
  }
  for (const auto& e : f.effects) {
    os << "  effect " << to_string(e.cls) << ' ' << quote(e.text) << " {\n";
    write_clauses(os, e.clauses, 4);
    os << "  }\n";
  }
  if (!f.references.empty()) {
    os << "  references";
    for (const auto& r : f.references) os << ' ' << quote(r);
    os << "\n";
  }
  os << "}\n";
}

}  // namespace

ParseResult parse_source(std::string_view text, const std::string& file) {
  ParseResult out;
  auto tokens = tokenize(text, file, out.diagnostics);
  Parser(std::move(tokens)).run(out);
  return out;
}

std::string serialize(const SpecDb& db) {
  std::ostringstream os;
  bool first = true;
  for (const auto& ref : db.declaration_order()) {
    if (!first) os << "\n";
    first = false;
    switch (ref.kind) {
      case DeclKind::States:
        os << "states ";
        write_ident_block(os, db.states());
        os << " initial " << db.initial_state() << "\n";
        break;
      case DeclKind::Levels:
        os << "levels ";
        write_ident_block(os, db.levels());
        os << "\n";
        break;
      case DeclKind::Error: {
        const auto& e = db.errors()[ref.index];
        os << "error " << e.number << ' ' << quote(e.text) << "\n";
        break;
      }
      case DeclKind::Enum: {
        const auto& e = db.enums()[ref.index];
        os << "enum " << e.name << ' ';
        write_ident_block(os, e.values);
        os << "\n";
        break;
      }
      case DeclKind::Data: {
        const auto& d = db.data_elements()[ref.index];
        os << "data " << quote(d.name) << " : " << to_string(d.dtype);
        if (!d.restriction.is_none()) os << ' ' << to_source(d.restriction);
        if (d.initial) os << " init " << to_source(*d.initial);
        os << "\n";
        break;
      }
      case DeclKind::Bundle: {
        const auto& b = db.bundles()[ref.index];
        os << "bundle " << quote(b.name) << " {\n";
        for (const auto& m : b.members) os << "  " << quote(m) << "\n";
        os << "}\n";
        break;
      }
      case DeclKind::Function:
        write_function(os, db.functions()[ref.index]);
        break;
      case DeclKind::Group: {
        const auto& g = db.groups()[ref.index];
        os << "group " << quote(g.name) << " {\n  calls";
        for (const auto& m : g.members) os << ' ' << quote(m);
        os << "\n}\n";
        break;
      }
    }
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

LoadedSpec load_spec_files(const std::vector<std::string>& paths) {
  LoadedSpec out;
  std::vector<Declaration> all;
  for (const auto& p : paths) {
    auto parsed = parse_source(read_file(p), p);
    for (auto& d : parsed.declarations) all.push_back(std::move(d));
    for (auto& d : parsed.diagnostics) out.parse_diagnostics.push_back(std::move(d));
  }
  out.db = build_spec_db(std::move(all));
  return out;
}

std::string format_parse_diagnostic(const ParseDiagnostic& d) {
  std::string s = d.location.file + ":" + std::to_string(d.location.line) + ":" + std::to_string(d.location.column) +
                  ": parse error: " + d.message;
  return s;
}

}  // namespace svsp
