#pragma once

// Series constructors shared by the catalog and the proof traces: single and
// double hypergeometric-type sums accumulated term by term, and infinite
// products over arbitrary monomials.

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "qrr/errors.hpp"
#include "qrr/qcore.hpp"

namespace qrr::build {

// (a; q^base)_(n + shift) inside a sum over n.
struct Poch {
  Monomial a;
  int base = 1;
  int shift = 0;
};

// sum_{n>=0} t^n q^(exponent(n)) prod num / prod den
struct SingleSum {
  std::function<long(long)> exponent;
  Monomial t = Monomial(1, 0);
  std::vector<Poch> num;
  std::vector<Poch> den;
};

// sum_{m,r>=0} tm^m tr^r q^(exponent(m,r)) num_m / (den_m (den_r))
struct DoubleSum {
  std::function<long(long, long)> exponent;
  Monomial tm = Monomial(1, 0);
  Monomial tr = Monomial(1, 0);
  Poch den_m;
  Poch den_r;
  std::optional<Poch> num_m;
};

// (a; q^base)_inf ^ power
struct Factor {
  Monomial a;
  int base = 1;
  int power = 1;
};

namespace detail {

inline long lead_exponent(const Monomial& t, long n, long e) {
  return e + static_cast<long>(t.q_exp()) * n;
}

inline void require_nonnegative(const std::vector<Poch>& ps) {
  for (const Poch& p : ps)
    if (!p.a.is_zero() && p.a.q_exp() < 0) throw Error("sum term pochhammer with negative exponent: truncation not certified");
}

// Multiplies (or divides) the running product by the factor with index j.
inline QLaurent step(const QLaurent& acc, const Poch& p, long j, bool divide) {
  if (p.a.is_zero()) return acc;
  const Monomial f = p.a * Monomial(1, static_cast<int>(p.base * j));
  if (!divide) return mul_one_minus(acc, f);
  try {
    return div_one_minus(acc, f);
  } catch (const NotInvertible&) {
    throw SingularTerm("sum term has a vanishing denominator factor (1 - " + f.str() + ")");
  }
}

// Last index whose leading exponent is at most the order, found by walking
// until two consecutive exponents exceed it while increasing. Also reports
// the smallest exponent met, for precision slack.
struct Extent {
  long last = -1;
  long min_exp = 0;
};

inline Extent sum_extent(const std::function<long(long)>& lead, int order, long start = 0) {
  const long cap = 8L * (order + 8) + 64;
  Extent ex;
  ex.min_exp = lead(start);
  for (long n = start;; ++n) {
    if (n - start > cap) throw DivergentSum("sum does not terminate below the order");
    const long e = lead(n);
    ex.min_exp = std::min(ex.min_exp, e);
    if (e <= order) {
      ex.last = n;
      continue;
    }
    const long e1 = lead(n + 1), e2 = lead(n + 2);
    if (e1 > e && e2 > e1) return ex;
  }
}

}  // namespace detail

inline QLaurent single_sum(const SingleSum& s, int order) {
  if (order < 0) throw Error("order must be nonnegative");
  detail::require_nonnegative(s.num);
  detail::require_nonnegative(s.den);
  if (s.t.is_zero()) {
    QLaurent out = QLaurent::one(order);
    for (const Poch& p : s.num)
      for (long j = 0; j < p.shift; ++j) out = detail::step(out, p, j, false);
    for (const Poch& p : s.den)
      for (long j = 0; j < p.shift; ++j) out = detail::step(out, p, j, true);
    return scale_monomial(out, Monomial(1, static_cast<int>(s.exponent(0))));
  }
  auto lead = [&](long n) { return detail::lead_exponent(s.t, n, s.exponent(n)); };
  const detail::Extent ex = detail::sum_extent(lead, order);
  const int work = order + static_cast<int>(std::max(0L, -ex.min_exp));
  QLaurent ratio = QLaurent::one(work);
  for (const Poch& p : s.num)
    for (long j = 0; j < p.shift; ++j) ratio = detail::step(ratio, p, j, false);
  for (const Poch& p : s.den)
    for (long j = 0; j < p.shift; ++j) ratio = detail::step(ratio, p, j, true);
  QLaurent total = QLaurent::zero(work);
  for (long n = 0; n <= ex.last; ++n) {
    if (n > 0) {
      for (const Poch& p : s.num) ratio = detail::step(ratio, p, n - 1 + p.shift, false);
      for (const Poch& p : s.den) ratio = detail::step(ratio, p, n - 1 + p.shift, true);
    }
    const Monomial m = s.t.pow(n) * Monomial(1, static_cast<int>(s.exponent(n)));
    total += scale_monomial(ratio, m);
  }
  return total.truncated(order);
}

inline QLaurent double_sum(const DoubleSum& s, int order) {
  if (order < 0) throw Error("order must be nonnegative");
  detail::require_nonnegative({s.den_m, s.den_r});
  if (s.num_m) detail::require_nonnegative({*s.num_m});
  auto lead = [&](long m, long r) {
    long e = s.exponent(m, r);
    if (m > 0 && s.tm.is_zero()) return static_cast<long>(order) + 1 + m + r;  // zero terms never matter
    if (r > 0 && s.tr.is_zero()) return static_cast<long>(order) + 1 + m + r;
    if (!s.tm.is_zero()) e += static_cast<long>(s.tm.q_exp()) * m;
    if (!s.tr.is_zero()) e += static_cast<long>(s.tr.q_exp()) * r;
    return e;
  };
  // Row extents and the minimal exponent per row.
  std::vector<detail::Extent> rows;
  long min_exp = 0;
  const long cap = 8L * (order + 8) + 64;
  auto row_min = [&](long m) { return detail::sum_extent([&](long r) { return lead(m, r); }, order); };
  for (long m = 0;; ++m) {
    if (m > cap) throw DivergentSum("double sum does not terminate in m");
    const detail::Extent ex = row_min(m);
    min_exp = std::min(min_exp, ex.min_exp);
    if (ex.min_exp > order) {
      const long n1 = row_min(m + 1).min_exp, n2 = row_min(m + 2).min_exp;
      if (n1 > ex.min_exp && n2 > n1) break;
    }
    rows.push_back(ex);
  }
  const int work = order + static_cast<int>(std::max(0L, -min_exp));
  long max_r = -1;
  for (const auto& ex : rows) max_r = std::max(max_r, ex.last);
  std::vector<QLaurent> inv_r;
  QLaurent acc = QLaurent::one(work);
  for (long r = 0; r <= max_r; ++r) {
    if (r > 0) acc = detail::step(acc, s.den_r, r - 1 + s.den_r.shift, true);
    inv_r.push_back(acc);
  }
  QLaurent total = QLaurent::zero(work);
  QLaurent outer = QLaurent::one(work);
  for (long m = 0; m < static_cast<long>(rows.size()); ++m) {
    if (m > 0) {
      outer = detail::step(outer, s.den_m, m - 1 + s.den_m.shift, true);
      if (s.num_m) outer = detail::step(outer, *s.num_m, m - 1 + s.num_m->shift, false);
    }
    if (rows[m].last < 0) continue;
    // Inner sum relative to q^(row minimum) keeps every shift nonnegative.
    const long base_e = rows[m].min_exp;
    QLaurent inner = QLaurent::zero(work);
    for (long r = 0; r <= rows[m].last; ++r) {
      if (lead(m, r) > work) continue;
      const Rational cr = s.tr.is_zero() ? Rational(r == 0 ? 1 : 0) : rational_pow(s.tr.coeff(), r);
      inner += scale_monomial(inv_r[static_cast<std::size_t>(r)], Monomial(cr, static_cast<int>(lead(m, r) - base_e)));
    }
    const Rational cm = s.tm.is_zero() ? Rational(m == 0 ? 1 : 0) : rational_pow(s.tm.coeff(), m);
    const Monomial wm(cm, static_cast<int>(base_e));
    total += scale_monomial(inner * outer, wm);
  }
  return total.truncated(order);
}

// prod of (a; q^base)_inf ^ power. Monomials with a negative exponent
// contribute finitely many Laurent factors; the rest is computed with enough
// slack that the truncation stays exact.
inline QLaurent product(const std::vector<Factor>& factors, int order) {
  if (order < 0) throw Error("order must be nonnegative");
  long slack = 0;
  for (const Factor& f : factors) {
    if (f.base < 1) throw DivergentProduct("product base must be a positive power of q");
    if (f.a.is_zero() || f.power <= 0) continue;
    for (long j = 0; f.a.q_exp() + f.base * j < 0; ++j) slack += -(f.a.q_exp() + f.base * j) * static_cast<long>(f.power);
  }
  const int work = order + static_cast<int>(slack);
  QLaurent out = QLaurent::one(work);
  for (const Factor& f : factors) {
    if (f.a.is_zero() || f.power == 0) continue;
    Monomial a = f.a;
    // Peel off factors with nonpositive exponent.
    while (a.q_exp() <= 0) {
      for (int p = 0; p < std::abs(f.power); ++p) {
        if (f.power > 0) {
          out = mul_one_minus(out, a);
        } else {
          try {
            out = div_one_minus(out, a);
          } catch (const NotInvertible&) {
            throw SingularTerm("product has a vanishing denominator factor (1 - " + a.str() + ")");
          }
        }
      }
      a = a * Monomial(1, f.base);
    }
    for (int p = 0; p < std::abs(f.power); ++p)
      out = out * (f.power > 0 ? pochhammer_infinite(a, f.base, work) : pochhammer_infinite_inverse(a, f.base, work));
  }
  return out.truncated(order);
}

}  // namespace qrr::build
