#pragma once

// Evaluation of DSL expressions to truncated Laurent series.
//
// Every intermediate value carries the exponent up to which its
// coefficients are certified. Negative valuations eat precision (a product
// with a q^-3 factor is only good to three below the working order), so
// eval() retries at a higher working order until the result is certified
// through the requested one.

#include <climits>
#include <map>
#include <optional>
#include <string>

#include "qrr/qdsl_ast.hpp"

namespace qrr::dsl {

// Values for the free parameters of an expression.
using Params = std::map<std::string, Monomial>;

class TruncationUncertified : public Error {
 public:
  explicit TruncationUncertified(const std::string& what) : Error("cannot certify truncation: " + what) {}
};

namespace detail {

struct NeedPrecision {};

struct Val {
  QLaurent s;
  long prec = 0;            // coefficients of q^e, e <= prec, are exact
  bool exact_zero = false;  // the true value is 0
  bool complete = false;    // s holds every term of the true value

  // Lower bound for the true valuation.
  [[nodiscard]] long val() const {
    if (exact_zero || (complete && s.is_zero())) return LONG_MAX / 4;
    if (s.is_zero() || s.min_exp() > prec) return prec + 1;
    return s.min_exp();
  }
};

class Evaluator {
 public:
  Evaluator(int work, const Params& params) : W_(work), params_(params) {}

  // Exact value when e is a single monomial (parameters included).
  std::optional<Monomial> monomial_of(const Expr& e) const { return monomial(e); }

  Val eval(const Expr& e) {
    if (auto m = monomial(e)) return exact(*m);
    switch (e.kind) {
      case Kind::Add: return add(eval(*e.kids[0]), eval(*e.kids[1]), false);
      case Kind::Sub: return add(eval(*e.kids[0]), eval(*e.kids[1]), true);
      case Kind::Neg: {
        Val v = eval(*e.kids[0]);
        v.s = -v.s;
        return v;
      }
      // Monomial factors are applied last: a far-out q^k must not truncate
      // the rest before its negative powers are multiplied in.
      case Kind::Mul: {
        if (auto m = monomial(*e.kids[0])) return scale(eval(*e.kids[1]), *m);
        if (auto m = monomial(*e.kids[1])) return scale(eval(*e.kids[0]), *m);
        return mul(eval(*e.kids[0]), eval(*e.kids[1]));
      }
      case Kind::Div: {
        if (auto m = monomial(*e.kids[0])) return scale(divide(exact(Monomial(1, 0)), *e.kids[1]), *m);
        return divide(eval(*e.kids[0]), *e.kids[1]);
      }
      case Kind::Pow: {
        const long k = integer_exponent(e);
        if (k >= 0) return power(eval(*e.kids[0]), k);
        return power(inverse(eval(*e.kids[0])), -k);
      }
      case Kind::Poch: return pochhammer(e, false, exact(Monomial(1, 0)));
      case Kind::Sum: return series_sum(e);
      case Kind::BiSum: return bilateral(e);
      case Kind::Prod: return infinite_product(e);
      default: throw Error("cannot evaluate expression");
    }
  }

 private:
  long clamp(long p) const { return std::min<long>(p, W_); }

  Val exact(const Monomial& m) const {
    return {QLaurent::monomial(m, W_), W_, m.is_zero(), m.is_zero() || m.q_exp() <= W_};
  }

  // Result of an operation on complete inputs whose true top degree is top.
  Val whole(QLaurent s, long top) const {
    const bool fits = s.is_zero() || top <= W_;
    return {std::move(s), W_, false, fits};
  }

  // --- exact scalar evaluation ---------------------------------------------

  long int_at(const Poly& p) const {
    const Rational r = p.eval(bound_);
    if (r.get_den() != 1) throw Error("exponent " + p.str() + " is not an integer at this point");
    if (r > Rational(INT_MAX / 4) || r < Rational(-(INT_MAX / 4))) throw Error("exponent out of range");
    return r.get_num().get_si();
  }

  long integer_exponent(const Expr& e) const { return int_at(e.exponent); }

  // Integer value of a bound, count, or base exponent.
  long integer(const Expr& e) const {
    auto m = monomial(e);
    if (!m || (!m->is_zero() && (m->q_exp() != 0 || m->coeff().get_den() != 1)))
      throw Error("expected an integer-valued expression");
    if (m->is_zero()) return 0;
    const mpz_class v = m->coeff().get_num();
    if (!v.fits_slong_p()) throw Error("integer out of range");
    return v.get_si();
  }

  // Exact value when the expression is a single monomial in q.
  std::optional<Monomial> monomial(const Expr& e) const {
    switch (e.kind) {
      case Kind::Int: return Monomial(Rational(e.value), 0);
      case Kind::Q: return Monomial(1, 1);
      case Kind::Var: {
        if (auto it = bound_.find(e.name); it != bound_.end()) return Monomial(Rational(it->second), 0);
        if (auto it = params_.find(e.name); it != params_.end()) return it->second;
        throw Error("no value for parameter " + e.name);
      }
      case Kind::Neg: {
        auto a = monomial(*e.kids[0]);
        if (a) return -*a;
        return std::nullopt;
      }
      case Kind::Mul:
      case Kind::Div: {
        auto a = monomial(*e.kids[0]);
        if (!a) return std::nullopt;
        auto b = monomial(*e.kids[1]);
        if (!b) return std::nullopt;
        return e.kind == Kind::Mul ? *a * *b : *a / *b;
      }
      case Kind::Add:
      case Kind::Sub: {
        auto a = monomial(*e.kids[0]);
        if (!a) return std::nullopt;
        auto b = monomial(*e.kids[1]);
        if (!b) return std::nullopt;
        if (e.kind == Kind::Sub) b = -*b;
        if (a->is_zero()) return b;
        if (b->is_zero()) return a;
        if (a->q_exp() != b->q_exp()) return std::nullopt;
        return Monomial(a->coeff() + b->coeff(), a->q_exp());
      }
      case Kind::Pow: {
        auto a = monomial(*e.kids[0]);
        if (!a) return std::nullopt;
        return a->pow(integer_exponent(e));
      }
      default: return std::nullopt;
    }
  }

  // --- arithmetic with precision ---------------------------------------------

  Val add(const Val& a, const Val& b, bool subtract) const {
    QLaurent s = subtract ? a.s - b.s : a.s + b.s;
    if (a.complete && b.complete) return {std::move(s), W_, a.exact_zero && b.exact_zero, true};
    return {std::move(s), std::min(a.prec, b.prec), a.exact_zero && b.exact_zero, false};
  }

  Val mul(const Val& a, const Val& b) const {
    if (a.exact_zero || b.exact_zero) return exact(Monomial());
    if (a.complete && b.complete) return whole(a.s * b.s, static_cast<long>(a.s.max_exp()) + b.s.max_exp());
    return {a.s * b.s, clamp(std::min(a.prec + b.val(), b.prec + a.val())), false, false};
  }

  Val inverse(const Val& b) const {
    if (b.exact_zero) throw NotInvertible("division by zero");
    const long v = b.val();
    if (v > b.prec) throw NeedPrecision{};
    const int vi = static_cast<int>(v);
    const QLaurent unit = scale_monomial(b.s, Monomial(1, -vi));
    const QLaurent inv = scale_monomial(qrr::inverse(unit), Monomial(1, -vi));
    return {inv, clamp(clamp(b.prec - v) - v), false};
  }

  Val power(const Val& a, long k) const {
    Val out = exact(Monomial(1, 0));
    for (long i = 0; i < k; ++i) out = mul(out, a);
    return out;
  }

  Val times_one_minus(const Val& a, const Monomial& m) const {
    if (a.exact_zero || m.is_zero()) return a;
    if (m == Monomial(1, 0)) return exact(Monomial());
    if (a.complete) return whole(mul_one_minus(a.s, m), a.s.max_exp() + std::max(0, m.q_exp()));
    return {mul_one_minus(a.s, m), std::min(a.prec, a.prec + m.q_exp()), false, false};
  }

  Val over_one_minus(const Val& a, const Monomial& m) const {
    if (m == Monomial(1, 0)) throw NotInvertible("division by (1 - 1)");
    if (a.exact_zero || m.is_zero()) return a;
    return {div_one_minus(a.s, m), m.q_exp() < 0 ? clamp(a.prec - m.q_exp()) : a.prec, false};
  }

  Val scale(const Val& a, const Monomial& m) const {
    if (m.is_zero() || a.exact_zero) return exact(Monomial());
    if (a.complete) return whole(scale_monomial(a.s, m), static_cast<long>(a.s.max_exp()) + m.q_exp());
    return {scale_monomial(a.s, m), clamp(a.prec + m.q_exp()), false, false};
  }

  // a / e, dividing factor by factor where the shape of e allows it.
  Val divide(const Val& a, const Expr& e) {
    if (auto m = monomial(e)) {
      if (m->is_zero()) throw NotInvertible("division by zero");
      return scale(a, Monomial(1, 0) / *m);
    }
    switch (e.kind) {
      case Kind::Mul: return divide(divide(a, *e.kids[0]), *e.kids[1]);
      case Kind::Poch: return pochhammer(e, true, a);
      case Kind::Sub:
      case Kind::Add: {
        auto one = monomial(*e.kids[0]);
        auto m = monomial(*e.kids[1]);
        if (one && m && *one == Monomial(1, 0)) return over_one_minus(a, e.kind == Kind::Sub ? *m : -*m);
        break;
      }
      case Kind::Pow: {
        const long k = integer_exponent(e);
        Val out = a;
        if (k >= 0) {
          for (long i = 0; i < k; ++i) out = divide(out, *e.kids[0]);
          return out;
        }
        return mul(a, power(eval(*e.kids[0]), -k));
      }
      default: break;
    }
    return mul(a, inverse(eval(e)));
  }

  // acc * (a; b)_n, or acc / (a; b)_n when dividing.
  Val pochhammer(const Expr& e, bool dividing, Val acc) {
    auto a = monomial(*e.kids[0]);
    if (!a) throw Error("first pochhammer argument must evaluate to a monomial");
    auto b = monomial(*e.kids[1]);
    if (!b || b->coeff() != 1 || b->q_exp() < 1) throw Error("pochhammer base must be q^k with k >= 1");
    const int base = b->q_exp();
    auto factor = [&](const Val& v, const Monomial& m, bool numerator) {
      return numerator != dividing ? times_one_minus(v, m) : over_one_minus(v, m);
    };
    if (a->is_zero()) return acc;
    if (e.kids[2]) {
      const long n = integer(*e.kids[2]);
      if (n >= 0) {
        for (long j = 0; j < n && !acc.exact_zero; ++j) acc = factor(acc, *a * Monomial(1, static_cast<int>(base * j)), true);
      } else {
        // (a; b)_-k = 1 / (a b^-k; b)_k
        for (long j = 1; j <= -n && !acc.exact_zero; ++j)
          acc = factor(acc, *a * Monomial(1, static_cast<int>(-base * j)), false);
      }
      return acc;
    }
    Monomial m = *a;
    while (m.q_exp() <= 0 && !acc.exact_zero) {
      acc = factor(acc, m, true);
      m = m * Monomial(1, base);
    }
    if (acc.exact_zero) return acc;
    const QLaurent tail = dividing ? pochhammer_infinite_inverse(m, base, W_) : pochhammer_infinite(m, base, W_);
    return mul(acc, {tail, W_, false});
  }

  // --- valuation bounds from the shape of an expression ------------------------

  static constexpr long kInf = LONG_MAX / 4;

  // Valuations live in [-kInf, kInf]: +kInf for zero, -kInf for a pole.
  static long plus(long a, long b) {
    if (a >= kInf || b >= kInf) {
      if (a <= -kInf || b <= -kInf) throw Error("indeterminate product of zero and a pole");
      return kInf;
    }
    if (a <= -kInf || b <= -kInf) return -kInf;
    return a + b;
  }
  static long times(long k, long v) {
    if (k == 0) return 0;
    if (v >= kInf || v <= -kInf) return (k > 0) == (v > 0) ? kInf : -kInf;
    return k * v;
  }

  // Valuation of a pochhammer symbol with monomial arguments (exact).
  long poch_val(const Expr& e) const {
    auto a = monomial(*e.kids[0]);
    auto b = monomial(*e.kids[1]);
    if (!a || !b || b->q_exp() < 1) throw Error("pochhammer arguments must be monomials with base q^k, k >= 1");
    if (a->is_zero()) return 0;
    auto one = [](const Monomial& m) { return m == Monomial(1, 0) ? kInf : std::min(0, m.q_exp()); };
    long total = 0;
    const int base = b->q_exp();
    if (!e.kids[2]) {
      for (Monomial m = *a; m.q_exp() <= 0; m = m * Monomial(1, base)) total = plus(total, one(m));
      return total;
    }
    const long n = integer(*e.kids[2]);
    for (long j = 0; j < n; ++j) {
      const Monomial m = *a * Monomial(1, static_cast<int>(base * j));
      if (m.q_exp() > 0) break;
      total = plus(total, one(m));
    }
    for (long j = 1; j <= -n; ++j) {
      const long v = one(*a * Monomial(1, static_cast<int>(-base * j)));
      if (v >= kInf) return -kInf;
      total -= v;
    }
    return total;
  }

  // Lower bound for the valuation.
  long lead(const Expr& e) {
    if (auto m = monomial(e)) return m->is_zero() ? kInf : m->q_exp();
    switch (e.kind) {
      case Kind::Add:
      case Kind::Sub: return std::min(lead(*e.kids[0]), lead(*e.kids[1]));
      case Kind::Neg: return lead(*e.kids[0]);
      case Kind::Mul: return plus(lead(*e.kids[0]), lead(*e.kids[1]));
      case Kind::Div: {
        const long a = lead(*e.kids[0]);
        return a >= kInf ? kInf : plus(a, times(-1, exact_val(*e.kids[1])));
      }
      case Kind::Pow: {
        const long k = integer_exponent(e);
        return k >= 0 ? times(k, lead(*e.kids[0])) : times(k, exact_val(*e.kids[0]));
      }
      case Kind::Poch: {
        const long v = poch_val(e);
        if (v <= -kInf) throw NotInvertible("pochhammer symbol of negative length has a pole");
        return v;
      }
      case Kind::Sum:
      case Kind::BiSum: return sum_lead(e);
      default: return eval(e).val();
    }
  }

  // Exact valuation, needed for denominators.
  long exact_val(const Expr& e) {
    if (auto m = monomial(e)) {
      if (m->is_zero()) throw NotInvertible("division by zero");
      return m->q_exp();
    }
    switch (e.kind) {
      case Kind::Neg: return exact_val(*e.kids[0]);
      case Kind::Mul: return plus(exact_val(*e.kids[0]), exact_val(*e.kids[1]));
      case Kind::Div: return plus(exact_val(*e.kids[0]), times(-1, exact_val(*e.kids[1])));
      case Kind::Pow: return times(integer_exponent(e), exact_val(*e.kids[0]));
      case Kind::Poch: {
        const long v = poch_val(e);
        if (v >= kInf) throw NotInvertible("division by a vanishing pochhammer symbol");
        return v;
      }
      case Kind::Add:
      case Kind::Sub: {
        auto ma = monomial(*e.kids[0]);
        auto mb = monomial(*e.kids[1]);
        if (ma && mb && !ma->is_zero() && !mb->is_zero() && ma->q_exp() != mb->q_exp())
          return std::min(ma->q_exp(), mb->q_exp());
        break;
      }
      default: break;
    }
    const Val v = eval(e);
    if (v.exact_zero) throw NotInvertible("division by zero");
    if (v.val() > v.prec) throw NeedPrecision{};
    return v.val();
  }

  // Lower bound for the valuation of e - 1 (factors of infinite products).
  long lead_minus_one(const Expr& e) {
    if (auto m = monomial(e)) return *m == Monomial(1, 0) ? kInf : std::min(0, m->q_exp());
    auto is_one = [&](const Expr& x) {
      auto m = monomial(x);
      return m && *m == Monomial(1, 0);
    };
    switch (e.kind) {
      case Kind::Add:
      case Kind::Sub:
        if (is_one(*e.kids[0])) return lead(*e.kids[1]);
        break;
      case Kind::Div:
        if (is_one(*e.kids[0])) {
          const long d = lead_minus_one(*e.kids[1]);
          return d > 0 ? d : 0;
        }
        break;
      case Kind::Mul: {
        const long a = lead_minus_one(*e.kids[0]), b = lead_minus_one(*e.kids[1]);
        return std::min(plus(a, lead(*e.kids[1])), b);
      }
      case Kind::Pow: {
        const long d = lead_minus_one(*e.kids[0]);
        return d > 0 ? d : 0;
      }
      case Kind::Poch: {
        auto a = monomial(*e.kids[0]);
        if (a && a->is_zero()) return kInf;
        if (a && a->q_exp() > 0) return a->q_exp();
        break;
      }
      default: break;
    }
    return 0;
  }

  long sum_lead(const Expr& e) {
    Binding guard(*this, e.name);
    const Expr& body = *e.kids.back();
    if (e.kind == Kind::Sum && e.kids[1]) {
      long best = kInf;
      const long hi = integer(*e.kids[1]);
      for (long n = integer(*e.kids[0]); n <= hi; ++n) {
        bound_[e.name] = n;
        best = std::min(best, lead(body));
      }
      return best;
    }
    auto side = [&](long start, long step) {
      long best = kInf, prev = 0;
      int run = 0;
      for (long n = start, count = 0;; n += step, ++count) {
        if (count > cap()) throw TruncationUncertified("cannot bound the degree of the sum over " + e.name);
        bound_[e.name] = n;
        const long v = lead(body);
        const bool beyond = v >= kInf || v > best;
        run = beyond ? ((run > 0 && (v > prev || v >= kInf)) ? run + 1 : 1) : 0;
        best = std::min(best, v);
        if (run >= 3) return best;
        prev = v;
      }
    };
    if (e.kind == Kind::Sum) return side(integer(*e.kids[0]), 1);
    return std::min(side(0, 1), side(-1, -1));
  }

  // --- binders ----------------------------------------------------------------

  long cap() const { return 8L * (W_ + 8) + 64; }

  // Adds terms n = start, start+step, ... until three consecutive terms lie
  // beyond the working order with strictly increasing valuations.
  void accumulate(const Expr& body, const std::string& v, long start, long step, Val& total) {
    int run = 0;
    long prev = 0, below = 0;
    for (long n = start, count = 0;; n += step, ++count) {
      if (count > cap()) {
        if (below * 2 > count) throw DivergentSum("sum over " + v + " does not leave the working order");
        throw TruncationUncertified("terms of the sum over " + v + " do not increase in degree");
      }
      bound_[v] = n;
      long val = lead(body);
      if (val <= W_) {
        const Val t = eval(body);
        val = std::max(val, t.val());
        if (val <= W_) {
          total = add(total, t, false);
          run = 0;
          ++below;
          prev = val;
          continue;
        }
        total.prec = std::min(total.prec, t.prec);
      }
      run = (run > 0 && (val > prev || val >= kInf)) ? run + 1 : 1;
      if (run >= 3) return;
      prev = val;
    }
  }

  struct Binding {
    Evaluator& ev;
    std::string name;
    std::optional<long> saved;
    Binding(Evaluator& e, const std::string& n) : ev(e), name(n) {
      if (auto it = ev.bound_.find(n); it != ev.bound_.end()) saved = it->second;
    }
    ~Binding() {
      if (saved) ev.bound_[name] = *saved;
      else ev.bound_.erase(name);
    }
  };

  Val series_sum(const Expr& e) {
    const long lo = integer(*e.kids[0]);
    std::optional<long> hi;
    if (e.kids[1]) hi = integer(*e.kids[1]);
    Binding guard(*this, e.name);
    Val total = exact(Monomial());
    if (hi) {
      if (*hi - lo > 1000000) throw Error("finite sum range too large");
      for (long n = lo; n <= *hi; ++n) {
        bound_[e.name] = n;
        total = add(total, eval(*e.kids[2]), false);
      }
      return total;
    }
    accumulate(*e.kids[2], e.name, lo, 1, total);
    return total;
  }

  Val bilateral(const Expr& e) {
    Binding guard(*this, e.name);
    Val total = exact(Monomial());
    accumulate(*e.kids[0], e.name, 0, 1, total);
    accumulate(*e.kids[0], e.name, -1, -1, total);
    return total;
  }

  Val infinite_product(const Expr& e) {
    const long lo = integer(*e.kids[0]);
    Binding guard(*this, e.name);
    Val acc = exact(Monomial(1, 0));
    const Val one = exact(Monomial(1, 0));
    int run = 0;
    long prev = 0;
    for (long n = lo, count = 0;; ++n, ++count) {
      if (count > cap()) throw DivergentProduct("factors of the product over " + e.name + " do not tend to 1");
      bound_[e.name] = n;
      const Val f = eval(*e.kids[1]);
      if (f.exact_zero) return f;
      const Val d = add(f, one, true);
      const long val = std::max(d.val(), lead_minus_one(*e.kids[1]));
      if (val <= W_) {
        acc = mul(acc, f);
        run = 0;
      } else {
        run = (run > 0 && (val > prev || val >= kInf)) ? run + 1 : 1;
        acc.prec = std::min(acc.prec, d.prec);
        if (run >= 3) return acc;
      }
      prev = val;
    }
  }

  int W_;
  const Params& params_;
  std::map<std::string, long> bound_;
};

}  // namespace detail

// Series of a closed expression through q^order.
inline QLaurent eval(const Expr& e, int order, const Params& params = {}) {
  if (order < 0) throw Error("order must be nonnegative");
  int work = order;
  const int limit = 4 * order + 256;
  for (;;) {
    std::optional<long> got;
    try {
      const detail::Val v = detail::Evaluator(work, params).eval(e);
      if (v.exact_zero) return QLaurent::zero(order);
      if (v.prec >= order) return v.s.truncated(order);
      got = v.prec;
    } catch (const detail::NeedPrecision&) {
    }
    if (work >= limit) {
      if (!got) throw NotInvertible("denominator vanishes through the working order");
      throw TruncationUncertified("precision " + std::to_string(*got) + " below order " + std::to_string(order));
    }
    const long bump = got ? std::max<long>(8, order - *got) : std::max(8, work / 2);
    work = static_cast<int>(std::min<long>(limit, work + bump));
  }
}

inline QLaurent eval(const ExprPtr& e, int order, const Params& params = {}) { return eval(*e, order, params); }

// The value of an expression that must be a single monomial, such as a
// parameter sample "-q^2".
inline Monomial monomial_value(const Expr& e, const Params& params = {}) {
  auto m = detail::Evaluator(0, params).monomial_of(e);
  if (!m) throw Error("expression " + format(e) + " is not a monomial");
  return *m;
}

}  // namespace qrr::dsl
