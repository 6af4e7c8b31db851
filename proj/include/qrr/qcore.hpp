#pragma once

// Exact truncated Laurent series in q with rational coefficients, plus the
// q-Pochhammer constructors every other module is built on.
//
// A QLaurent of order N is an element of Q((q)) modulo q^(N+1): coefficients
// of exponents above N are never stored. Binary operations require equal
// orders; there is no implicit re-truncation.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qrr/errors.hpp"

namespace qrr {

using Rational = mpq_class;

inline Rational rational_pow(const Rational& base, long n) {
  if (n < 0) {
    if (base == 0) throw NotInvertible("zero raised to a negative power");
    return rational_pow(Rational(1) / base, -n);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(n));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(n));
  Rational out(num, den);
  out.canonicalize();
  return out;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

// c * q^e, or the distinguished zero monomial.
class Monomial {
 public:
  Monomial() : coeff_(0), q_exp_(0), zero_(true) {}
  Monomial(Rational coeff, int q_exp) : coeff_(std::move(coeff)), q_exp_(q_exp), zero_(coeff_ == 0) {
    if (zero_) q_exp_ = 0;
  }

  static Monomial zero() { return {}; }
  static Monomial q_power(int e, long c = 1) { return {Rational(c), e}; }

  [[nodiscard]] bool is_zero() const { return zero_; }
  [[nodiscard]] const Rational& coeff() const { return coeff_; }
  [[nodiscard]] int q_exp() const { return q_exp_; }

  [[nodiscard]] Monomial pow(long n) const {
    if (zero_) {
      if (n < 0) throw NotInvertible("zero monomial raised to a negative power");
      return n == 0 ? Monomial(1, 0) : Monomial();
    }
    return {rational_pow(coeff_, n), static_cast<int>(q_exp_ * n)};
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    if (a.zero_ || b.zero_) return {};
    return {a.coeff_ * b.coeff_, a.q_exp_ + b.q_exp_};
  }
  friend Monomial operator/(const Monomial& a, const Monomial& b) {
    if (b.zero_) throw NotInvertible("division by the zero monomial");
    if (a.zero_) return {};
    return {a.coeff_ / b.coeff_, a.q_exp_ - b.q_exp_};
  }
  friend Monomial operator-(const Monomial& a) {
    if (a.zero_) return a;
    return {-a.coeff_, a.q_exp_};
  }
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.zero_ == b.zero_ && a.coeff_ == b.coeff_ && a.q_exp_ == b.q_exp_;
  }

  [[nodiscard]] std::string str() const {
    if (zero_) return "0";
    std::string c = coeff_.get_str();
    if (q_exp_ == 0) return c;
    std::string q = q_exp_ == 1 ? "q" : "q^" + (q_exp_ < 0 ? "(" + std::to_string(q_exp_) + ")" : std::to_string(q_exp_));
    if (coeff_ == 1) return q;
    if (coeff_ == -1) return "-" + q;
    return c + "*" + q;
  }

 private:
  Rational coeff_;
  int q_exp_;
  bool zero_;
};

class QLaurent {
 public:
  QLaurent() = default;
  explicit QLaurent(int order) : order_(order) {
    if (order < 0) throw Error("truncation order must be nonnegative");
  }

  static QLaurent zero(int order) { return QLaurent(order); }
  static QLaurent constant(const Rational& c, int order) { return monomial(Monomial(c, 0), order); }
  static QLaurent one(int order) { return constant(1, order); }

  static QLaurent monomial(const Monomial& m, int order) {
    QLaurent out(order);
    if (!m.is_zero() && m.q_exp() <= order) {
      out.lo_ = m.q_exp();
      out.c_.push_back(m.coeff());
    }
    return out;
  }

  static QLaurent from_terms(const std::map<int, Rational>& terms, int order) {
    QLaurent out(order);
    if (terms.empty()) return out;
    out.lo_ = terms.begin()->first;
    int hi = std::min(order, terms.rbegin()->first);
    if (hi < out.lo_) return out;
    out.c_.assign(static_cast<std::size_t>(hi - out.lo_ + 1), Rational(0));
    for (const auto& [e, c] : terms)
      if (e <= order) out.c_[static_cast<std::size_t>(e - out.lo_)] = c;
    out.canonicalize();
    return out;
  }

  // Coefficients for q^0..q^(coeffs.size()-1).
  static QLaurent from_dense(const std::vector<Rational>& coeffs, int order, int lo = 0) {
    QLaurent out(order);
    out.lo_ = lo;
    int n = std::min<int>(static_cast<int>(coeffs.size()), order - lo + 1);
    if (n > 0) out.c_.assign(coeffs.begin(), coeffs.begin() + n);
    out.canonicalize();
    return out;
  }

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] bool is_zero() const { return c_.empty(); }

  // Lowest exponent with a nonzero coefficient; order()+1 for the zero series.
  [[nodiscard]] int min_exp() const { return c_.empty() ? order_ + 1 : lo_; }
  [[nodiscard]] int max_exp() const { return c_.empty() ? order_ + 1 : lo_ + static_cast<int>(c_.size()) - 1; }

  [[nodiscard]] Rational coeff(int e) const {
    if (c_.empty() || e < lo_ || e > max_exp()) return 0;
    return c_[static_cast<std::size_t>(e - lo_)];
  }

  [[nodiscard]] std::map<int, Rational> terms() const {
    std::map<int, Rational> out;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) out.emplace(lo_ + static_cast<int>(i), c_[i]);
    return out;
  }

  [[nodiscard]] bool is_integral() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rational& c) { return c.get_den() == 1; });
  }

  [[nodiscard]] QLaurent truncated(int new_order) const {
    if (new_order > order_) throw OrderMismatch(order_, new_order);
    QLaurent out(new_order);
    if (c_.empty() || lo_ > new_order) return out;
    out.lo_ = lo_;
    out.c_.assign(c_.begin(), c_.begin() + std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(c_.size()), new_order - lo_ + 1));
    out.canonicalize();
    return out;
  }

  // Leading monomial (the zero monomial for the zero series).
  [[nodiscard]] Monomial leading() const { return c_.empty() ? Monomial() : Monomial(c_.front(), lo_); }

  // Returns the single monomial if the series has exactly one term.
  [[nodiscard]] std::optional<Monomial> as_monomial() const {
    if (c_.empty()) return Monomial();
    if (c_.size() != 1) return std::nullopt;
    return Monomial(c_.front(), lo_);
  }

  friend bool operator==(const QLaurent& a, const QLaurent& b) {
    return a.order_ == b.order_ && (a.c_.empty() ? b.c_.empty() : (a.lo_ == b.lo_ && a.c_ == b.c_));
  }
  friend bool operator!=(const QLaurent& a, const QLaurent& b) { return !(a == b); }

  friend QLaurent operator+(const QLaurent& a, const QLaurent& b) { return combine(a, b, false); }
  friend QLaurent operator-(const QLaurent& a, const QLaurent& b) { return combine(a, b, true); }
  friend QLaurent operator-(const QLaurent& a) {
    QLaurent out = a;
    for (auto& c : out.c_) c = -c;
    return out;
  }

  friend QLaurent operator*(const QLaurent& a, const QLaurent& b) {
    check_orders(a, b);
    QLaurent out(a.order_);
    if (a.c_.empty() || b.c_.empty()) return out;
    const int lo = a.lo_ + b.lo_;
    const int hi = std::min(a.order_, a.max_exp() + b.max_exp());
    if (hi < lo) return out;
    out.lo_ = lo;
    out.c_.assign(static_cast<std::size_t>(hi - lo + 1), Rational(0));
    Rational tmp;
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      const int ei = a.lo_ + static_cast<int>(i);
      for (std::size_t j = 0; j < b.c_.size(); ++j) {
        const int e = ei + b.lo_ + static_cast<int>(j);
        if (e > hi) break;
        if (b.c_[j] == 0) continue;
        mpq_mul(tmp.get_mpq_t(), a.c_[i].get_mpq_t(), b.c_[j].get_mpq_t());
        out.c_[static_cast<std::size_t>(e - lo)] += tmp;
      }
    }
    out.canonicalize();
    return out;
  }

  QLaurent& operator+=(const QLaurent& b) { return *this = *this + b; }
  QLaurent& operator-=(const QLaurent& b) { return *this = *this - b; }
  QLaurent& operator*=(const QLaurent& b) { return *this = *this * b; }

  [[nodiscard]] std::string str(int max_terms = 12) const;

  friend std::ostream& operator<<(std::ostream& os, const QLaurent& s) { return os << s.str(); }

 private:
  static void check_orders(const QLaurent& a, const QLaurent& b) {
    if (a.order_ != b.order_) throw OrderMismatch(a.order_, b.order_);
  }

  static QLaurent combine(const QLaurent& a, const QLaurent& b, bool subtract) {
    check_orders(a, b);
    if (b.c_.empty()) return a;
    if (a.c_.empty()) return subtract ? -b : b;
    QLaurent out(a.order_);
    out.lo_ = std::min(a.lo_, b.lo_);
    const int hi = std::max(a.max_exp(), b.max_exp());
    out.c_.assign(static_cast<std::size_t>(hi - out.lo_ + 1), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) out.c_[static_cast<std::size_t>(a.lo_ - out.lo_) + i] = a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) {
      auto& slot = out.c_[static_cast<std::size_t>(b.lo_ - out.lo_) + i];
      if (subtract) slot -= b.c_[i];
      else slot += b.c_[i];
    }
    out.canonicalize();
    return out;
  }

  void canonicalize() {
    std::size_t first = 0;
    while (first < c_.size() && c_[first] == 0) ++first;
    if (first == c_.size()) {
      c_.clear();
      lo_ = 0;
      return;
    }
    std::size_t last = c_.size();
    while (c_[last - 1] == 0) --last;
    if (first > 0 || last < c_.size()) {
      c_ = std::vector<Rational>(c_.begin() + static_cast<std::ptrdiff_t>(first), c_.begin() + static_cast<std::ptrdiff_t>(last));
      lo_ += static_cast<int>(first);
    }
  }

  friend QLaurent scale_monomial(const QLaurent& a, const Monomial& m);
  friend QLaurent mul_one_minus(const QLaurent& a, const Monomial& m);
  friend QLaurent div_one_minus(const QLaurent& a, const Monomial& m);

  int order_ = 0;
  int lo_ = 0;
  std::vector<Rational> c_;  // c_[i] is the coefficient of q^(lo_ + i)
};

inline std::string QLaurent::str(int max_terms) const {
  if (c_.empty()) return "0 + O(q^" + std::to_string(order_ + 1) + ")";
  std::ostringstream os;
  int shown = 0;
  for (std::size_t i = 0; i < c_.size() && (max_terms < 0 || shown < max_terms); ++i) {
    if (c_[i] == 0) continue;
    const int e = lo_ + static_cast<int>(i);
    Rational c = c_[i];
    if (shown > 0) {
      os << (c < 0 ? " - " : " + ");
      c = abs(c);
    } else if (c < 0) {
      os << "-";
      c = abs(c);
    }
    if (e == 0) os << c.get_str();
    else {
      if (c != 1) os << c.get_str();
      os << "q";
      if (e != 1) os << "^" << e;
    }
    ++shown;
  }
  os << " + O(q^" << order_ + 1 << ")";
  return os.str();
}

inline QLaurent add(const QLaurent& a, const QLaurent& b) { return a + b; }
inline QLaurent sub(const QLaurent& a, const QLaurent& b) { return a - b; }
inline QLaurent mul(const QLaurent& a, const QLaurent& b) { return a * b; }

// Shift every exponent by m.q_exp and multiply by m.coeff; exponents pushed
// above the order are dropped.
inline QLaurent scale_monomial(const QLaurent& a, const Monomial& m) {
  QLaurent out(a.order_);
  if (m.is_zero() || a.c_.empty()) return out;
  out.lo_ = a.lo_ + m.q_exp();
  const int keep = std::min<int>(static_cast<int>(a.c_.size()), a.order_ - out.lo_ + 1);
  if (keep <= 0) return out;
  out.c_.reserve(static_cast<std::size_t>(keep));
  for (int i = 0; i < keep; ++i) out.c_.push_back(a.c_[static_cast<std::size_t>(i)] * m.coeff());
  out.canonicalize();
  return out;
}

// a * (1 - m)
inline QLaurent mul_one_minus(const QLaurent& a, const Monomial& m) {
  if (m.is_zero()) return a;
  return a - scale_monomial(a, m);
}

// a / (1 - m), exact through the order of a. Handles monomials of any
// exponent: for a negative exponent the factor is re-expanded about its
// leading term, 1/(1 - c q^-d) = -(1/c) q^d / (1 - q^d / c).
inline QLaurent div_one_minus(const QLaurent& a, const Monomial& m) {
  if (m.is_zero()) return a;
  const int d = m.q_exp();
  if (d == 0) {
    if (m.coeff() == 1) throw NotInvertible("division by (1 - 1)");
    return scale_monomial(a, Monomial(Rational(1) / (1 - m.coeff()), 0));
  }
  if (d < 0) {
    const Monomial inv_m = Monomial(1, 0) / m;
    return div_one_minus(scale_monomial(a, -inv_m), inv_m);
  }
  // y = a + m*y, solved upward in exponent.
  QLaurent out = a;
  if (out.c_.empty()) return out;
  const int hi = a.order_;
  out.c_.resize(static_cast<std::size_t>(hi - out.lo_ + 1), Rational(0));
  Rational tmp;
  for (std::size_t i = static_cast<std::size_t>(d); i < out.c_.size(); ++i) {
    if (out.c_[i - static_cast<std::size_t>(d)] == 0) continue;
    mpq_mul(tmp.get_mpq_t(), out.c_[i - static_cast<std::size_t>(d)].get_mpq_t(), m.coeff().get_mpq_t());
    out.c_[i] += tmp;
  }
  out.canonicalize();
  return out;
}

// Multiplicative inverse of a series with min_exp 0 and nonzero constant term.
inline QLaurent inverse(const QLaurent& a) {
  if (a.is_zero() || a.min_exp() != 0) throw NotInvertible("inverse needs a nonzero constant term and no negative powers");
  const int n = a.order();
  const Rational inv0 = Rational(1) / a.coeff(0);
  std::vector<Rational> ac(static_cast<std::size_t>(n + 1));
  for (int e = 0; e <= std::min(n, a.max_exp()); ++e) ac[static_cast<std::size_t>(e)] = a.coeff(e);
  std::vector<Rational> b(static_cast<std::size_t>(n + 1));
  b[0] = inv0;
  Rational acc, tmp;
  for (int k = 1; k <= n; ++k) {
    acc = 0;
    for (int j = 1; j <= k; ++j) {
      if (ac[static_cast<std::size_t>(j)] == 0) continue;
      mpq_mul(tmp.get_mpq_t(), ac[static_cast<std::size_t>(j)].get_mpq_t(), b[static_cast<std::size_t>(k - j)].get_mpq_t());
      acc += tmp;
    }
    b[static_cast<std::size_t>(k)] = -inv0 * acc;
  }
  return QLaurent::from_dense(b, n);
}

inline QLaurent operator/(const QLaurent& a, const QLaurent& b) { return a * inverse(b); }

// q -> q^k.
inline QLaurent substitute_power(const QLaurent& a, int k) {
  if (k < 1) throw Error("substitute_power needs a positive power");
  std::map<int, Rational> t;
  for (const auto& [e, c] : a.terms())
    if (static_cast<long>(e) * k <= a.order()) t.emplace(e * k, c);
  return QLaurent::from_terms(t, a.order());
}

// q -> -q.
inline QLaurent substitute_negate(const QLaurent& a) {
  auto t = a.terms();
  for (auto& [e, c] : t)
    if (e % 2 != 0) c = -c;
  return QLaurent::from_terms(t, a.order());
}

// (a; q^step)_n = prod_{j<n} (1 - a q^(step j)); the zero monomial gives 1.
inline QLaurent pochhammer_finite(const Monomial& a, int step, int n, int order) {
  if (step < 1) throw Error("pochhammer base must be a positive power of q");
  if (n < 0) throw Error("finite pochhammer length must be nonnegative");
  QLaurent out = QLaurent::one(order);
  if (a.is_zero()) return out;
  for (int j = 0; j < n; ++j) {
    out = mul_one_minus(out, a * Monomial(1, step * j));
    if (out.is_zero()) break;
  }
  return out;
}

// 1 / (a; q^step)_n, built by repeated division so it stays O(n * order).
inline QLaurent pochhammer_finite_inverse(const Monomial& a, int step, int n, int order) {
  if (step < 1) throw Error("pochhammer base must be a positive power of q");
  QLaurent out = QLaurent::one(order);
  if (a.is_zero()) return out;
  for (int j = 0; j < n; ++j) out = div_one_minus(out, a * Monomial(1, step * j));
  return out;
}

// (a; q^step)_inf truncated at the order. Factors with exponent above the
// order are identically 1 and are skipped.
inline QLaurent pochhammer_infinite(const Monomial& a, int step, int order) {
  if (a.is_zero()) return QLaurent::one(order);
  if (step < 1 || a.q_exp() < 0 || a.q_exp() + step < 1)
    throw DivergentProduct("infinite product (" + a.str() + "; q^" + std::to_string(step) + ") does not stabilize");
  QLaurent out = QLaurent::one(order);
  for (int j = 0; a.q_exp() + step * j <= order; ++j) {
    out = mul_one_minus(out, a * Monomial(1, step * j));
    if (out.is_zero()) break;
  }
  return out;
}

inline QLaurent pochhammer_infinite_inverse(const Monomial& a, int step, int order) {
  if (a.is_zero()) return QLaurent::one(order);
  if (step < 1 || a.q_exp() < 0 || a.q_exp() + step < 1)
    throw DivergentProduct("infinite product (" + a.str() + "; q^" + std::to_string(step) + ") does not stabilize");
  QLaurent out = QLaurent::one(order);
  for (int j = 0; a.q_exp() + step * j <= order; ++j) out = div_one_minus(out, a * Monomial(1, step * j));
  return out;
}

}  // namespace qrr
