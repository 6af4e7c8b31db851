#pragma once

// Recursive-descent front end for the DSL.
//
//   expr     := term (('+'|'-') term)*
//   term     := factor (('*')? factor | '/' factor)*
//   factor   := '-' factor | atom ('^' exponent)?
//   atom     := INT | 'q' | VAR | '(' expr ')' | poch | sum | bisum | prod
//   poch     := 'poch' '(' expr ',' expr ',' (expr | 'inf') ')'
//   sum      := 'sum' VAR '=' expr '..' (factor | 'inf') expr
//   bisum    := 'bisum' VAR expr
//   prod     := 'prod' VAR '=' expr '..' 'inf' expr
//   exponent := '(' polynomial ')' | INT | VAR
//
// A finite upper summation bound is a factor, so "sum k=0..(n+1) body"
// needs the parentheses; otherwise the bound would absorb the body.

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qrr/qdsl_ast.hpp"

namespace qrr::dsl {

class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& what, std::vector<std::string> expected = {})
      : Error("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what),
        line_(line),
        col_(col),
        expected_(std::move(expected)) {}
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return col_; }
  [[nodiscard]] const std::vector<std::string>& expected() const { return expected_; }

 private:
  int line_, col_;
  std::vector<std::string> expected_;
};

class UnboundVariable : public ParseError {
 public:
  UnboundVariable(int line, int col, const std::string& name) : ParseError(line, col, "unbound variable " + name) {}
};

class NonQuadraticExponent : public ParseError {
 public:
  NonQuadraticExponent(int line, int col, int degree)
      : ParseError(line, col, "non-quadratic exponent (degree " + std::to_string(degree) + ")") {}
};

namespace detail {

enum class Tok { Int, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, Equals, DotDot, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  int line = 1, col = 1;
};

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"q", "poch", "sum", "bisum", "prod", "inf"};
  return k;
}

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.type = Tok::Int;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.type = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (c == '.' && i + 1 < src.size() && src[i + 1] == '.') {
      t.type = Tok::DotDot;
      t.text = "..";
      advance(2);
    } else {
      static const std::string ops = "+-*/^(),=";
      static const Tok types[] = {Tok::Plus,   Tok::Minus,  Tok::Star,  Tok::Slash, Tok::Caret,
                                  Tok::LParen, Tok::RParen, Tok::Comma, Tok::Equals};
      const auto k = ops.find(c);
      if (k == std::string::npos) throw ParseError(line, col, std::string("unexpected character '") + c + "'");
      t.type = types[k];
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(const std::string& src, std::set<std::string> params) : toks_(lex(src)), params_(std::move(params)) {}

  ExprPtr parse_all() {
    ExprPtr e = expr();
    if (peek().type != Tok::End) fail({"'+'", "'-'", "'*'", "'/'", "end of input"});
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool is_kw(const Token& t, const char* kw) const { return t.type == Tok::Ident && t.text == kw; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    const std::string found = t.type == Tok::End ? "end of input" : "'" + t.text + "'";
    std::string list;
    for (const auto& e : expected) list += (list.empty() ? "" : ", ") + e;
    throw ParseError(t.line, t.col, "expected " + list + "; found " + found, std::move(expected));
  }

  void expect(Tok type, const char* label) {
    if (peek().type != type) fail({label});
    ++pos_;
  }

  static std::vector<std::string> atom_starts() {
    return {"integer", "'q'", "variable", "'('", "'poch'", "'sum'", "'bisum'", "'prod'", "'-'"};
  }

  bool starts_atom(const Token& t) const {
    if (t.type == Tok::Int || t.type == Tok::LParen) return true;
    return t.type == Tok::Ident && t.text != "inf";
  }

  bool bound(const std::string& n) const { return std::find(scope_.begin(), scope_.end(), n) != scope_.end(); }

  ExprPtr expr() {
    ExprPtr e = term();
    while (peek().type == Tok::Plus || peek().type == Tok::Minus) {
      const bool plus = next().type == Tok::Plus;
      ExprPtr r = term();
      e = plus ? add(e, r) : sub(e, r);
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = factor();
    for (;;) {
      if (peek().type == Tok::Star) {
        ++pos_;
        e = mul(e, factor());
      } else if (peek().type == Tok::Slash) {
        ++pos_;
        e = div(e, factor());
      } else if (starts_atom(peek())) {
        e = mul(e, factor());
      } else {
        return e;
      }
    }
  }

  ExprPtr factor() {
    if (peek().type == Tok::Minus) {
      ++pos_;
      return neg(factor());
    }
    ExprPtr a = atom();
    if (peek().type != Tok::Caret) return a;
    ++pos_;
    const Token& at = peek();
    Poly p;
    if (at.type == Tok::Int) {
      p = Poly(Rational(mpz_class(next().text)));
    } else if (at.type == Tok::LParen) {
      ++pos_;
      p = poly_expr();
      expect(Tok::RParen, "')'");
    } else if (at.type == Tok::Ident && !keywords().count(at.text)) {
      p = poly_var();
    } else {
      fail({"integer", "variable", "'('"});
    }
    if (p.degree() > 2) throw NonQuadraticExponent(at.line, at.col, p.degree());
    return pow(a, p);
  }

  ExprPtr atom() {
    const Token& t = peek();
    if (t.type == Tok::Int) return integer(mpz_class(next().text));
    if (t.type == Tok::LParen) {
      ++pos_;
      ExprPtr e = expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.type != Tok::Ident || t.text == "inf") fail(atom_starts());
    if (t.text == "q") {
      ++pos_;
      return qvar();
    }
    if (t.text == "poch") return poch_form();
    if (t.text == "sum") return sum_form();
    if (t.text == "bisum") return bisum_form();
    if (t.text == "prod") return prod_form();
    ++pos_;
    if (!bound(t.text) && !params_.count(t.text)) throw UnboundVariable(t.line, t.col, t.text);
    return var(t.text);
  }

  ExprPtr poch_form() {
    ++pos_;
    expect(Tok::LParen, "'('");
    ExprPtr a = expr();
    expect(Tok::Comma, "','");
    ExprPtr b = expr();
    expect(Tok::Comma, "','");
    ExprPtr n;
    if (is_kw(peek(), "inf")) ++pos_;
    else n = expr();
    expect(Tok::RParen, "')'");
    return poch(a, b, n);
  }

  std::string binder_var() {
    const Token& t = peek();
    if (t.type != Tok::Ident || keywords().count(t.text)) fail({"variable"});
    if (params_.count(t.text)) throw ParseError(t.line, t.col, "parameter " + t.text + " cannot be used as a summation variable");
    return next().text;
  }

  ExprPtr scoped(const std::string& v) {
    scope_.push_back(v);
    ExprPtr body = expr();
    scope_.pop_back();
    return body;
  }

  ExprPtr sum_form() {
    ++pos_;
    const std::string v = binder_var();
    expect(Tok::Equals, "'='");
    ExprPtr lo = expr();
    expect(Tok::DotDot, "'..'");
    ExprPtr hi;
    if (is_kw(peek(), "inf")) ++pos_;
    else if (peek().type == Tok::Minus || starts_atom(peek())) hi = factor();
    else fail({"'inf'", "integer", "variable", "'('", "'-'"});
    return sum(v, lo, hi, scoped(v));
  }

  ExprPtr bisum_form() {
    ++pos_;
    const std::string v = binder_var();
    return bisum(v, scoped(v));
  }

  ExprPtr prod_form() {
    ++pos_;
    const std::string v = binder_var();
    expect(Tok::Equals, "'='");
    ExprPtr lo = expr();
    expect(Tok::DotDot, "'..'");
    if (!is_kw(peek(), "inf")) fail({"'inf'"});
    ++pos_;
    return prod(v, lo, scoped(v));
  }

  // Exponent polynomials: integers and bound variables only, division by
  // nonzero integer constants allowed.
  Poly poly_expr() {
    Poly p = poly_term();
    while (peek().type == Tok::Plus || peek().type == Tok::Minus) {
      const bool plus = next().type == Tok::Plus;
      Poly r = poly_term();
      p = plus ? p + r : p - r;
    }
    return p;
  }

  Poly poly_term() {
    Poly p = poly_factor();
    for (;;) {
      const Token& t = peek();
      if (t.type == Tok::Star) {
        ++pos_;
        p = p * poly_factor();
      } else if (t.type == Tok::Slash) {
        ++pos_;
        const Token& at = peek();
        Poly d = poly_factor();
        if (!d.is_constant() || d.constant() == 0)
          throw ParseError(at.line, at.col, "exponent must be a polynomial: divide only by a nonzero integer");
        p = p.scaled(Rational(1) / d.constant());
      } else if (t.type == Tok::Int || t.type == Tok::LParen || (t.type == Tok::Ident && !keywords().count(t.text))) {
        p = p * poly_factor();
      } else {
        return p;
      }
    }
  }

  Poly poly_var() {
    const Token& t = peek();
    if (!bound(t.text)) {
      if (params_.count(t.text)) throw ParseError(t.line, t.col, "parameter " + t.text + " cannot appear in an exponent");
      throw UnboundVariable(t.line, t.col, t.text);
    }
    return Poly::var(next().text);
  }

  Poly poly_factor() {
    if (peek().type == Tok::Minus) {
      ++pos_;
      return -poly_factor();
    }
    Poly base;
    const Token& t = peek();
    if (t.type == Tok::Int) {
      base = Poly(Rational(mpz_class(next().text)));
    } else if (t.type == Tok::LParen) {
      ++pos_;
      base = poly_expr();
      expect(Tok::RParen, "')'");
    } else if (t.type == Tok::Ident && !keywords().count(t.text)) {
      base = poly_var();
    } else {
      fail({"integer", "variable", "'('", "'-'"});
    }
    if (peek().type != Tok::Caret) return base;
    ++pos_;
    const Token& et = peek();
    if (et.type != Tok::Int) fail({"integer"});
    const long k = std::stol(next().text);
    if (k > 8) throw NonQuadraticExponent(et.line, et.col, static_cast<int>(k));
    Poly out(Rational(1));
    for (long i = 0; i < k; ++i) out = out * base;
    return out;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> params_;
  std::vector<std::string> scope_;
};

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

}  // namespace detail

// Parses a closed expression. Names in params are free parameters bound to
// monomials at evaluation time.
inline ExprPtr parse(const std::string& text, const std::set<std::string>& params = {}) {
  for (const auto& p : params)
    if (detail::keywords().count(p)) throw Error("parameter name " + p + " is reserved");
  return detail::Parser(text, params).parse_all();
}

// Parameters are declared by a comment line "# params: a t".
inline std::set<std::string> declared_params(const std::string& text) {
  std::set<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] != '#') continue;
    const std::string body = detail::trim(t.substr(1));
    if (body.rfind("params:", 0) != 0) continue;
    std::istringstream names(body.substr(7));
    std::string n;
    while (names >> n) out.insert(n);
  }
  return out;
}

struct IdentityText {
  ExprPtr lhs;
  ExprPtr rhs;
  std::set<std::string> params;
};

// Two expressions separated by a line holding a lone '='. Line numbers in
// errors refer to the whole file.
inline IdentityText parse_identity(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) lines.push_back(l);
  }
  std::size_t sep = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string code = lines[i].substr(0, lines[i].find('#'));
    if (detail::trim(code) == "=") {
      if (sep != lines.size()) throw ParseError(static_cast<int>(i + 1), 1, "more than one '=' separator line");
      sep = i;
    }
  }
  if (sep == lines.size()) throw ParseError(static_cast<int>(lines.size()) + 1, 1, "identity file needs a line holding '='");
  std::string left, right;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    left += (i < sep ? lines[i] : "") + "\n";
    right += (i > sep ? lines[i] : "") + "\n";
  }
  IdentityText out;
  out.params = declared_params(text);
  out.lhs = parse(left, out.params);
  out.rhs = parse(right, out.params);
  return out;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qrr::dsl
