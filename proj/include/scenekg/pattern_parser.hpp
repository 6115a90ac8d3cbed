#pragma once
// Lexer, recursive-descent parser and canonical printer for the pattern
// language.
//
//   query      := "pattern" IDENT "{" statement+ "}"
//   statement  := matchstmt | markstmt | countstmt
//   matchstmt  := "match" nodepat (edgepat nodepat)* ("where" pred ("and" pred)*)? ";"
//   nodepat    := "(" IDENT ":" KINDORMARK ")"
//   edgepat    := "-[" EDGEKIND "]" ("->" | "-")
//   markstmt   := "mark" IDENT "(" IDENT ("," IDENT)* ")" ";"
//   countstmt  := "count" "(" ("root" | IDENT) ")" ";"
//   pred       := IDENT "." IDENT CMP literal | IDENT "." IDENT "in" "{" literal ("," literal)* "}"
//   KINDORMARK := "Lane" | "Connector" | "LaneMarker" | "Crosswalk" | "Ego" | "Object" | "@" IDENT
//
// mark and count statements refer to the variables of the match statement
// directly before them.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "scenekg/error.hpp"
#include "scenekg/pattern_ast.hpp"

namespace scenekg::pattern {

inline constexpr std::array<std::string_view, 8> kKeywords{"pattern", "match", "where", "and",
                                                           "mark",    "count", "root",  "in"};

inline bool is_keyword(std::string_view s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

enum class Tok : std::uint8_t {
  Ident, Number, String,
  LParen, RParen, LBrace, RBrace, Colon, At, EdgeOpen, RBracket, Arrow, Dash,
  Semicolon, Comma, Dot, Cmp,
  Invalid,  // lexical error; text holds the message
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier, operator spelling or decoded string
  double number = 0.0;
  Span span;
};

namespace detail {

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  /// Stops at the first lexical error, emitting an Invalid token so the
  /// parser can report it together with what it expected there.
  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      try {
        Token t = next();
        const bool end = t.kind == Tok::End;
        out.push_back(std::move(t));
        if (end) return out;
      } catch (const Failure& f) {
        out.push_back(Token{Tok::Invalid, f.message, 0.0, f.span});
        out.push_back(Token{Tok::End, "", 0.0, f.span});
        return out;
      }
    }
  }

 private:
  struct Failure {
    std::string message;
    Span span;
  };

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  Span here(std::size_t len) const { return {line_, col_, pos_, len}; }

  Token make(Tok kind, std::size_t len) {
    Token t{kind, std::string(src_.substr(pos_, len)), 0.0, here(len)};
    pos_ += len;
    col_ += len;
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw Failure{msg, here(1)}; }

  static bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
  static bool digit(char c) { return c >= '0' && c <= '9'; }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  Token next() {
    if (pos_ >= src_.size()) return Token{Tok::End, "", 0.0, here(0)};
    const char c = peek();
    if (ident_start(c)) {
      std::size_t len = 1;
      while (ident_char(peek(len))) ++len;
      return make(Tok::Ident, len);
    }
    if (digit(c) || (c == '-' && (digit(peek(1)) || (peek(1) == '.' && digit(peek(2))))) ||
        (c == '.' && digit(peek(1))))
      return number();
    switch (c) {
      case '(': return make(Tok::LParen, 1);
      case ')': return make(Tok::RParen, 1);
      case '{': return make(Tok::LBrace, 1);
      case '}': return make(Tok::RBrace, 1);
      case ':': return make(Tok::Colon, 1);
      case '@': return make(Tok::At, 1);
      case ']': return make(Tok::RBracket, 1);
      case ';': return make(Tok::Semicolon, 1);
      case ',': return make(Tok::Comma, 1);
      case '.': return make(Tok::Dot, 1);
      case '=': return make(Tok::Cmp, 1);
      case '-':
        if (peek(1) == '[') return make(Tok::EdgeOpen, 2);
        if (peek(1) == '>') return make(Tok::Arrow, 2);
        return make(Tok::Dash, 1);
      case '!':
        if (peek(1) == '=') return make(Tok::Cmp, 2);
        fail("unexpected '!'");
      case '<':
      case '>': return make(Tok::Cmp, peek(1) == '=' ? 2 : 1);
      case '"': return string();
      default: break;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Token number() {
    std::size_t len = 0;
    if (peek(len) == '-') ++len;
    while (digit(peek(len))) ++len;
    if (peek(len) == '.') {
      ++len;
      while (digit(peek(len))) ++len;
    }
    if (peek(len) == 'e' || peek(len) == 'E') {
      std::size_t exp = len + 1;
      if (peek(exp) == '+' || peek(exp) == '-') ++exp;
      if (digit(peek(exp))) {
        len = exp;
        while (digit(peek(len))) ++len;
      }
    }
    double value = 0.0;
    const char* first = src_.data() + pos_;
    const auto res = std::from_chars(first, first + len, value);
    if (res.ec != std::errc() || res.ptr != first + len || !std::isfinite(value))
      fail("number literal out of range or malformed");
    Token t = make(Tok::Number, len);
    t.number = value;
    return t;
  }

  Token string() {
    const Span start = here(0);
    const std::size_t begin = pos_;
    std::string value;
    std::size_t i = pos_ + 1;
    for (;;) {
      if (i >= src_.size() || src_[i] == '\n') fail("unterminated string literal");
      const char c = src_[i];
      if (c == '"') break;
      if (c == '\\') {
        const char e = i + 1 < src_.size() ? src_[i + 1] : '\0';
        switch (e) {
          case '\\': value += '\\'; break;
          case '"': value += '"'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default: fail("unknown escape sequence in string literal");
        }
        i += 2;
        continue;
      }
      value += c;
      ++i;
    }
    const std::size_t len = i + 1 - begin;
    pos_ += len;
    col_ += len;
    Token t{Tok::String, std::move(value), 0.0, start};
    t.span.length = len;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  PatternQuery query() {
    PatternQuery q;
    q.span = cur().span;
    keyword("pattern");
    q.name = ident("pattern name");
    expect(Tok::LBrace, "'{'");
    do {
      q.statements.push_back(statement());
    } while (!at(Tok::RBrace));
    expect(Tok::RBrace, "'}'");
    if (!at(Tok::End)) fail({"end of input"});
    return q;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && cur().text == kw; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = cur();
    std::string found = t.kind == Tok::End ? "end of input" : t.kind == Tok::Invalid ? t.text : "'" + t.text + "'";
    std::string msg = "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
    msg += ", found " + found;
    throw Error(Errc::SyntaxError, msg, {t.span.line, t.span.column}, std::move(expected));
  }

  Token expect(Tok k, const char* what) {
    if (!at(k)) fail({what});
    return take();
  }

  void keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail({"'" + std::string(kw) + "'"});
    take();
  }

  std::string ident(const char* what) {
    if (!at(Tok::Ident) || is_keyword(cur().text)) fail({what});
    return take().text;
  }

  Statement statement() {
    if (at_keyword("match")) return match();
    if (at_keyword("mark")) return mark();
    if (at_keyword("count")) return count();
    fail({"'match'", "'mark'", "'count'"});
  }

  NodePattern node() {
    NodePattern n;
    n.span = cur().span;
    expect(Tok::LParen, "'('");
    n.var = ident("variable name");
    expect(Tok::Colon, "':'");
    if (at(Tok::At)) {
      take();
      n.mark = ident("mark label");
    } else {
      if (!at(Tok::Ident)) fail({"node kind", "'@'"});
      const Token t = take();
      n.kind = parse_node_kind(t.text);
      if (!n.kind) throw Error(Errc::UnknownKind, "unknown node kind '" + t.text + "'", {t.span.line, t.span.column});
    }
    expect(Tok::RParen, "')'");
    return n;
  }

  EdgePattern edge() {
    EdgePattern e;
    e.span = cur().span;
    expect(Tok::EdgeOpen, "'-['");
    if (!at(Tok::Ident)) fail({"edge kind"});
    const Token t = take();
    const auto kind = parse_edge_keyword(t.text);
    if (!kind) throw Error(Errc::UnknownKind, "unknown edge kind '" + t.text + "'", {t.span.line, t.span.column});
    e.kind = *kind;
    expect(Tok::RBracket, "']'");
    if (at(Tok::Arrow)) {
      e.directed = true;
    } else if (at(Tok::Dash)) {
      e.directed = false;
    } else {
      fail({"'->'", "'-'"});
    }
    take();
    return e;
  }

  Literal literal() {
    if (at(Tok::Number)) return take().number;
    if (at(Tok::String)) return take().text;
    fail({"number", "string"});
  }

  Predicate predicate() {
    Predicate p;
    p.span = cur().span;
    p.var = ident("variable name");
    expect(Tok::Dot, "'.'");
    p.attr = ident("attribute name");
    if (at_keyword("in")) {
      take();
      p.is_membership = true;
      expect(Tok::LBrace, "'{'");
      p.values.push_back(literal());
      while (at(Tok::Comma)) {
        take();
        p.values.push_back(literal());
      }
      expect(Tok::RBrace, "'}'");
      return p;
    }
    if (!at(Tok::Cmp)) fail({"comparison operator", "'in'"});
    const std::string op = take().text;
    static constexpr std::array ops{CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
    for (CmpOp candidate : ops)
      if (to_string(candidate) == op) p.op = candidate;
    p.values.push_back(literal());
    return p;
  }

  MatchStmt match() {
    MatchStmt m;
    m.span = cur().span;
    keyword("match");
    m.nodes.push_back(node());
    while (at(Tok::EdgeOpen)) {
      m.edges.push_back(edge());
      m.nodes.push_back(node());
    }
    if (at_keyword("where")) {
      take();
      m.where.push_back(predicate());
      while (at_keyword("and")) {
        take();
        m.where.push_back(predicate());
      }
    }
    if (!at(Tok::Semicolon)) {
      if (m.where.empty()) fail({"'-['", "'where'", "';'"});
      fail({"'and'", "';'"});
    }
    take();
    return m;
  }

  MarkStmt mark() {
    MarkStmt m;
    m.span = cur().span;
    keyword("mark");
    m.label = ident("mark label");
    expect(Tok::LParen, "'('");
    m.vars.push_back(ident("variable name"));
    while (at(Tok::Comma)) {
      take();
      m.vars.push_back(ident("variable name"));
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Semicolon, "';'");
    return m;
  }

  CountStmt count() {
    CountStmt c;
    c.span = cur().span;
    keyword("count");
    expect(Tok::LParen, "'('");
    if (at_keyword("root")) {
      take();
      c.root = true;
    } else {
      c.var = ident("'root' or variable name");
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Semicolon, "';'");
    return c;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline std::set<std::string, std::less<>> bound_vars(const MatchStmt& m) {
  std::set<std::string, std::less<>> vars;
  for (const auto& n : m.nodes) vars.insert(n.var);
  return vars;
}

[[noreturn]] inline void unbound(const std::string& var, const Span& span) {
  throw Error(Errc::UnboundVariable, "variable '" + var + "' is not bound by the preceding match",
              {span.line, span.column});
}

}  // namespace detail

/// Checks that every variable used by a predicate, mark or count is bound by
/// the relevant match statement.
inline void check_bindings(const PatternQuery& q) {
  const MatchStmt* last = nullptr;
  for (const Statement& st : q.statements) {
    if (const auto* m = std::get_if<MatchStmt>(&st)) {
      const auto vars = detail::bound_vars(*m);
      for (const auto& p : m->where)
        if (!vars.contains(p.var)) detail::unbound(p.var, p.span);
      last = m;
    } else if (const auto* mk = std::get_if<MarkStmt>(&st)) {
      for (const auto& v : mk->vars)
        if (last == nullptr || !detail::bound_vars(*last).contains(v)) detail::unbound(v, mk->span);
    } else if (const auto* c = std::get_if<CountStmt>(&st)) {
      if (!c->root && (last == nullptr || !detail::bound_vars(*last).contains(c->var))) detail::unbound(c->var, c->span);
    }
  }
}

inline PatternQuery parse(std::string_view source) {
  detail::Lexer lexer(source);
  detail::Parser parser(lexer.run());
  PatternQuery q = parser.query();
  check_bindings(q);
  return q;
}

/// Parses several pattern sources; names must be unique across them.
inline std::vector<PatternQuery> parse_all(const std::vector<std::string>& sources) {
  std::vector<PatternQuery> out;
  std::set<std::string, std::less<>> names;
  for (const auto& src : sources) {
    PatternQuery q = parse(src);
    if (!names.insert(q.name).second)
      throw Error(Errc::DuplicatePatternName, "pattern '" + q.name + "' defined more than once",
                  {q.span.line, q.span.column});
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Printing

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

inline std::string format_literal(const Literal& lit) {
  if (const double* d = std::get_if<double>(&lit)) return format_number(*d);
  return quote(std::get<std::string>(lit));
}

inline std::string unparse(const MatchStmt& m) {
  std::string out = "match ";
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    if (i > 0) {
      const EdgePattern& e = m.edges[i - 1];
      out += "-[" + std::string(edge_keyword(e.kind)) + "]" + (e.directed ? "->" : "-");
    }
    const NodePattern& n = m.nodes[i];
    out += "(" + n.var + ":" + (n.kind ? std::string(to_string(*n.kind)) : "@" + n.mark) + ")";
  }
  for (std::size_t i = 0; i < m.where.size(); ++i) {
    const Predicate& p = m.where[i];
    out += i == 0 ? " where " : " and ";
    out += p.var + "." + p.attr;
    if (p.is_membership) {
      out += " in {";
      for (std::size_t j = 0; j < p.values.size(); ++j) out += (j ? ", " : "") + format_literal(p.values[j]);
      out += "}";
    } else {
      out += " " + std::string(to_string(p.op)) + " " + format_literal(p.values.at(0));
    }
  }
  return out + ";";
}

/// Canonical text of a query; parse(unparse(q)) == q.
inline std::string unparse(const PatternQuery& q) {
  std::string out = "pattern " + q.name + " {\n";
  for (const Statement& st : q.statements) {
    out += "  ";
    if (const auto* m = std::get_if<MatchStmt>(&st)) {
      out += unparse(*m);
    } else if (const auto* mk = std::get_if<MarkStmt>(&st)) {
      out += "mark " + mk->label + "(";
      for (std::size_t i = 0; i < mk->vars.size(); ++i) out += (i ? ", " : "") + mk->vars[i];
      out += ");";
    } else {
      const auto& c = std::get<CountStmt>(st);
      out += "count(" + (c.root ? std::string("root") : c.var) + ");";
    }
    out += "\n";
  }
  return out + "}\n";
}

}  // namespace scenekg::pattern
