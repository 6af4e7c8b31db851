#pragma once

// Expression trees of the q-series DSL, exponent polynomials, and the
// canonical formatter.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "qrr/errors.hpp"
#include "qrr/qcore.hpp"

namespace qrr::dsl {

// Polynomial in the summation variables with rational coefficients.
// Keys map variable name -> degree; the empty key is the constant term.
class Poly {
 public:
  using Key = std::map<std::string, int>;

  Poly() = default;
  explicit Poly(const Rational& c) {
    if (c != 0) terms_[{}] = c;
  }
  static Poly var(const std::string& name) {
    Poly p;
    p.terms_[{{name, 1}}] = 1;
    return p;
  }

  [[nodiscard]] const std::map<Key, Rational>& terms() const { return terms_; }
  [[nodiscard]] bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
  [[nodiscard]] Rational constant() const {
    auto it = terms_.find({});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  [[nodiscard]] int degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, key_degree(k));
    return d;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [k, c] : b.terms_) out.accumulate(k, c);
    return out;
  }
  friend Poly operator-(const Poly& a) {
    Poly out = a;
    for (auto& [k, c] : out.terms_) c = -c;
    return out;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        Key k = ka;
        for (const auto& [v, d] : kb) k[v] += d;
        out.accumulate(k, ca * cb);
      }
    return out;
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  [[nodiscard]] Poly scaled(const Rational& r) const {
    Poly out;
    for (const auto& [k, c] : terms_) out.accumulate(k, c * r);
    return out;
  }

  // Value at integer points; throws if a variable is missing.
  [[nodiscard]] Rational eval(const std::map<std::string, long>& env) const {
    Rational total = 0;
    for (const auto& [k, c] : terms_) {
      Rational t = c;
      for (const auto& [v, d] : k) {
        auto it = env.find(v);
        if (it == env.end()) throw Error("unbound variable " + v + " in exponent");
        t *= rational_pow(Rational(it->second), d);
      }
      total += t;
    }
    return total;
  }

  // Canonical text: integer coefficients print plainly, otherwise the
  // common denominator is pulled out as "(...)/d".
  [[nodiscard]] std::string str() const {
    mpz_class den = 1;
    for (const auto& [k, c] : terms_) den = lcm(den, mpz_class(c.get_den()));
    const Poly whole = scaled(Rational(den));
    std::string body = whole.integer_str();
    if (den == 1) return body;
    return "(" + body + ")/" + den.get_str();
  }

 private:
  static int key_degree(const Key& k) {
    int d = 0;
    for (const auto& [v, e] : k) d += e;
    return d;
  }

  void accumulate(const Key& k, const Rational& c) {
    Rational& slot = terms_[k];
    slot += c;
    if (slot == 0) terms_.erase(k);
  }

  [[nodiscard]] std::string integer_str() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<Key, Rational>> order(terms_.begin(), terms_.end());
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return key_degree(a.first) > key_degree(b.first); });
    std::string out;
    bool first = true;
    for (const auto& [k, c] : order) {
      const bool neg = c < 0;
      const Rational mag = neg ? Rational(-c) : c;
      if (first) out += neg ? "-" : "";
      else out += neg ? " - " : " + ";
      first = false;
      std::string vars;
      for (const auto& [v, d] : k) {
        if (!vars.empty()) vars += " ";
        vars += v + (d == 1 ? "" : "^" + std::to_string(d));
      }
      if (vars.empty()) out += mag.get_str();
      else if (mag == 1) out += vars;
      else out += mag.get_str() + " " + vars;
    }
    return out;
  }

  std::map<Key, Rational> terms_;
};

enum class Kind { Int, Q, Var, Pow, Poch, Sum, BiSum, Prod, Add, Sub, Mul, Div, Neg };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Child layout by kind:
//   Pow   kids = {base}, exponent
//   Poch  kids = {a, base, count}; count null means infinite
//   Sum   kids = {lower, upper, body}; upper null means infinite
//   BiSum kids = {body}
//   Prod  kids = {lower, body}
//   binary ops {lhs, rhs}; Neg {operand}
struct Expr {
  Kind kind = Kind::Int;
  mpz_class value;      // Int literals, always nonnegative
  std::string name;     // Var, and the bound variable of Sum/BiSum/Prod
  Poly exponent;        // Pow
  std::vector<ExprPtr> kids;
};

inline bool operator==(const Expr& a, const Expr& b);

inline bool same(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.value != b.value || a.name != b.name || !(a.exponent == b.exponent) ||
      a.kids.size() != b.kids.size())
    return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!same(a.kids[i], b.kids[i])) return false;
  return true;
}

// Constructors.
inline ExprPtr make(Kind k, std::vector<ExprPtr> kids = {}, std::string name = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->kids = std::move(kids);
  e->name = std::move(name);
  return e;
}
inline ExprPtr integer(const mpz_class& v) {
  if (v < 0) throw Error("integer literals are nonnegative; use negation");
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Int;
  e->value = v;
  return e;
}
inline ExprPtr qvar() { return make(Kind::Q); }
inline ExprPtr var(const std::string& n) { return make(Kind::Var, {}, n); }
inline ExprPtr pow(ExprPtr base, Poly p) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Pow;
  e->kids = {std::move(base)};
  e->exponent = std::move(p);
  return e;
}
inline ExprPtr qpow(Poly p) { return pow(qvar(), std::move(p)); }
inline ExprPtr poch(ExprPtr a, ExprPtr base, ExprPtr count) { return make(Kind::Poch, {std::move(a), std::move(base), std::move(count)}); }
inline ExprPtr sum(const std::string& v, ExprPtr lo, ExprPtr hi, ExprPtr body) {
  return make(Kind::Sum, {std::move(lo), std::move(hi), std::move(body)}, v);
}
inline ExprPtr bisum(const std::string& v, ExprPtr body) { return make(Kind::BiSum, {std::move(body)}, v); }
inline ExprPtr prod(const std::string& v, ExprPtr lo, ExprPtr body) { return make(Kind::Prod, {std::move(lo), std::move(body)}, v); }
inline ExprPtr add(ExprPtr a, ExprPtr b) { return make(Kind::Add, {std::move(a), std::move(b)}); }
inline ExprPtr sub(ExprPtr a, ExprPtr b) { return make(Kind::Sub, {std::move(a), std::move(b)}); }
inline ExprPtr mul(ExprPtr a, ExprPtr b) { return make(Kind::Mul, {std::move(a), std::move(b)}); }
inline ExprPtr div(ExprPtr a, ExprPtr b) { return make(Kind::Div, {std::move(a), std::move(b)}); }
inline ExprPtr neg(ExprPtr a) { return make(Kind::Neg, {std::move(a)}); }

// ---------------------------------------------------------------------------
// Formatter. Levels: 1 sum/difference, 2 product/quotient, 3 unary minus,
// 4 power, 5 atom. Sum-like binders extend to the right, so they print bare
// only in the rightmost position of their context.

namespace detail {

inline int level(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

inline bool binder(Kind k) { return k == Kind::Sum || k == Kind::BiSum || k == Kind::Prod; }

std::string fmt(const Expr& e, bool rightmost);

inline std::string wrap(const Expr& e, int min_level, bool rightmost) {
  const bool need = level(e.kind) < min_level || (binder(e.kind) && !rightmost);
  return need ? "(" + fmt(e, true) + ")" : fmt(e, rightmost);
}

inline bool starts_with_minus(const Expr& e) {
  // Implicit multiplication cannot start with '-'; Neg is the only such form
  // once operands have been parenthesised by level.
  return e.kind == Kind::Neg;
}

inline std::string fmt(const Expr& e, bool rightmost) {
  switch (e.kind) {
    case Kind::Int: return e.value.get_str();
    case Kind::Q: return "q";
    case Kind::Var: return e.name;
    case Kind::Pow: {
      const std::string base = wrap(*e.kids[0], 5, false);
      const Poly& p = e.exponent;
      if (p.is_constant() && p.constant() >= 0 && p.constant().get_den() == 1) return base + "^" + p.constant().get_str();
      return base + "^(" + p.str() + ")";
    }
    case Kind::Poch:
      return "poch(" + fmt(*e.kids[0], true) + ", " + fmt(*e.kids[1], true) + ", " +
             (e.kids[2] ? fmt(*e.kids[2], true) : "inf") + ")";
    case Kind::Sum:
      return "sum " + e.name + "=" + wrap(*e.kids[0], 0, false) + ".." + (e.kids[1] ? wrap(*e.kids[1], 3, false) : "inf") +
             " " + fmt(*e.kids[2], true);
    case Kind::BiSum: return "bisum " + e.name + " " + fmt(*e.kids[0], true);
    case Kind::Prod: return "prod " + e.name + "=" + fmt(*e.kids[0], true) + "..inf " + fmt(*e.kids[1], true);
    case Kind::Add:
    case Kind::Sub:
      return wrap(*e.kids[0], 1, false) + (e.kind == Kind::Add ? " + " : " - ") + wrap(*e.kids[1], 2, rightmost);
    case Kind::Mul: {
      const std::string rhs = wrap(*e.kids[1], 3, rightmost);
      const bool explicit_op = level(e.kids[1]->kind) >= 3 && starts_with_minus(*e.kids[1]);
      return wrap(*e.kids[0], 2, false) + (explicit_op ? " * " : " ") + rhs;
    }
    case Kind::Div: return wrap(*e.kids[0], 2, false) + " / " + wrap(*e.kids[1], 3, rightmost);
    case Kind::Neg: return "-" + wrap(*e.kids[0], 3, rightmost);
  }
  return {};
}

}  // namespace detail

inline std::string format(const Expr& e) { return detail::fmt(e, true); }
inline std::string format(const ExprPtr& e) { return format(*e); }

}  // namespace qrr::dsl
