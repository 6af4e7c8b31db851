#pragma once

// Brute-force enumerators used to certify engine results. Everything here
// works on plain int64 coefficient arrays and shares no code with qcore, so
// agreement between the two is evidence rather than tautology.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrr/errors.hpp"

namespace qrr::oracles {

// Coefficients of q^0..q^N.
using IntSeries = std::vector<std::int64_t>;

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("oracle coefficient overflow");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("oracle coefficient overflow");
  return r;
}

inline IntSeries unit_series(int order) {
  IntSeries s(static_cast<std::size_t>(order + 1), 0);
  s[0] = 1;
  return s;
}

enum class ParityFilter { any, odd_only, even_only };

// Parts n >= 1 with n mod modulus in allowed_residues (every part when the
// residue set is empty and modulus is 1), optionally distinct.
struct PartitionClass {
  int modulus = 1;
  std::set<int> allowed_residues{0};
  bool distinct = false;
  ParityFilter parity = ParityFilter::any;

  [[nodiscard]] bool admits(int part) const {
    if (part < 1) return false;
    if (parity == ParityFilter::odd_only && part % 2 == 0) return false;
    if (parity == ParityFilter::even_only && part % 2 != 0) return false;
    return allowed_residues.count(part % modulus) > 0;
  }

  void validate() const {
    if (modulus < 1) throw Error("partition class modulus must be positive");
    for (int r : allowed_residues)
      if (r < 0 || r >= modulus) throw Error("partition class residue out of range");
  }

  static PartitionClass residues(int modulus, std::set<int> res) { return {modulus, std::move(res), false, ParityFilter::any}; }
  static PartitionClass all_parts() { return {1, {0}, false, ParityFilter::any}; }
  static PartitionClass distinct_parts() { return {1, {0}, true, ParityFilter::any}; }
  static PartitionClass empty() { return {1, {}, false, ParityFilter::any}; }
};

// Number of partitions of each k <= order into parts from the class, by the
// standard knapsack recurrence (0/1 for distinct parts, unbounded otherwise).
inline IntSeries count_partitions(const PartitionClass& pc, int order) {
  if (order < 0) throw Error("order must be nonnegative");
  pc.validate();
  IntSeries ways = unit_series(order);
  for (int part = 1; part <= order; ++part) {
    if (!pc.admits(part)) continue;
    if (pc.distinct) {
      for (int k = order; k >= part; --k) ways[k] = checked_add(ways[k], ways[k - part]);
    } else {
      for (int k = part; k <= order; ++k) ways[k] = checked_add(ways[k], ways[k - part]);
    }
  }
  return ways;
}

// Factors (1 + sign * q^(first + step*k)) for k = 0, 1, ... (infinite) or
// k < count. power > 1 repeats the progression; a negative power divides
// by it instead.
struct Progression {
  int sign = -1;
  int first = 1;
  int step = 1;
  std::optional<int> count;  // nullopt: infinite progression
  int power = 1;
};

// Multiplies s by (1 + sign q^e) in place.
inline void mul_binomial(IntSeries& s, int sign, int e) {
  const int order = static_cast<int>(s.size()) - 1;
  if (e > order) return;
  for (int k = order; k >= e; --k) s[k] = checked_add(s[k], checked_mul(sign, s[k - e]));
}

// Divides s by (1 + sign q^e) in place (e >= 1).
inline void div_binomial(IntSeries& s, int sign, int e) {
  const int order = static_cast<int>(s.size()) - 1;
  if (e > order) return;
  for (int k = e; k <= order; ++k) s[k] = checked_add(s[k], checked_mul(-sign, s[k - e]));
}

inline IntSeries expand_product_bruteforce(const std::vector<Progression>& factors, int order) {
  if (order < 0) throw Error("order must be nonnegative");
  IntSeries s = unit_series(order);
  for (const auto& f : factors) {
    if (f.step < 1) throw Error("progression step must be positive");
    if (f.first < 1 && (f.power < 0 || f.first < 0)) throw Error("progression must start at a positive exponent");
    for (int k = 0; !f.count || k < *f.count; ++k) {
      const long e = f.first + static_cast<long>(f.step) * k;
      if (e > order) break;
      for (int p = 0; p < (f.power < 0 ? -f.power : f.power); ++p) {
        if (f.power > 0) mul_binomial(s, f.sign, static_cast<int>(e));
        else div_binomial(s, f.sign, static_cast<int>(e));
      }
    }
  }
  return s;
}

// Series quotient num / den with den[0] == 1, over the integers.
inline IntSeries divide(const IntSeries& num, const IntSeries& den) {
  if (num.size() != den.size() || den.empty() || den[0] != 1) throw Error("oracle division needs unit denominator");
  IntSeries out(num.size(), 0);
  for (std::size_t k = 0; k < num.size(); ++k) {
    std::int64_t acc = num[k];
    for (std::size_t j = 1; j <= k; ++j)
      if (den[j] != 0) acc = checked_add(acc, -checked_mul(den[j], out[k - j]));
    out[k] = acc;
  }
  return out;
}

inline IntSeries multiply(const IntSeries& a, const IntSeries& b) {
  if (a.size() != b.size()) throw Error("oracle multiply: order mismatch");
  IntSeries out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] = checked_add(out[i + j], checked_mul(a[i], b[j]));
  }
  return out;
}

// (c q^e; q^base)_k with integer c, as a descriptor for double-sum terms.
struct FinitePoch {
  std::int64_t coeff = 1;
  int q_exp = 1;
  int base = 1;
};

// Integer quadratic form a m^2 + b mr + c r^2 + d m + e r.
struct QuadraticForm {
  long mm = 0, mr = 0, rr = 0, m = 0, r = 0;
  [[nodiscard]] long operator()(long im, long ir) const { return mm * im * im + mr * im * ir + rr * ir * ir + m * im + r * ir; }
};

// Weight t^(wm*m + wr*r) with t = coeff * q^q_exp.
struct Weight {
  std::int64_t coeff = 1;
  int q_exp = 0;
  int wm = 0;
  int wr = 0;
};

enum class Index { m, r };

struct DoubleSum {
  QuadraticForm exponent;
  FinitePoch denom_m{1, 1, 1};  // divides by (denom_m)_m
  FinitePoch denom_r{1, 1, 1};  // divides by (denom_r)_r
  std::optional<std::pair<FinitePoch, Index>> numer;
  std::optional<Weight> weight;
};

namespace detail {

inline void mul_poch(IntSeries& s, const FinitePoch& p, long n) {
  for (long j = 0; j < n; ++j) {
    const long e = p.q_exp + static_cast<long>(p.base) * j;
    if (e < 0) throw Error("oracle pochhammer with negative exponent");
    const int order = static_cast<int>(s.size()) - 1;
    if (e > order) break;
    for (int k = order; k >= e; --k) s[k] = checked_add(s[k], -checked_mul(p.coeff, s[k - e]));
  }
}

inline void div_poch(IntSeries& s, const FinitePoch& p, long n) {
  if (p.q_exp < 1) throw Error("oracle denominator pochhammer needs a positive exponent");
  for (long j = 0; j < n; ++j) {
    const long e = p.q_exp + static_cast<long>(p.base) * j;
    const int order = static_cast<int>(s.size()) - 1;
    if (e > order) break;
    for (int k = static_cast<int>(e); k <= order; ++k) s[k] = checked_add(s[k], checked_mul(p.coeff, s[k - e]));
  }
}

inline std::int64_t ipow(std::int64_t b, long n) {
  std::int64_t r = 1;
  for (long i = 0; i < n; ++i) r = checked_mul(r, b);
  return r;
}

}  // namespace detail

// Exact truncated sum over all (m, r) >= 0 contributing below q^(order+1).
// Rows in r stop once the term's leading exponent exceeds the order and
// keeps increasing; the same rule bounds m. Growth is checked, not assumed.
inline IntSeries double_sum_eval(const DoubleSum& ds, int order) {
  if (order < 0) throw Error("order must be nonnegative");
  IntSeries total(static_cast<std::size_t>(order + 1), 0);
  auto lead = [&](long m, long r) {
    long e = ds.exponent(m, r);
    if (ds.weight) e += static_cast<long>(ds.weight->q_exp) * (ds.weight->wm * m + ds.weight->wr * r);
    return e;
  };
  const long limit = 4L * (order + 8) + 64;
  int empty_rows = 0;
  for (long m = 0;; ++m) {
    if (m > limit) throw DivergentSum("double sum does not terminate in m");
    bool row_used = false;
    for (long r = 0;; ++r) {
      if (r > limit) throw DivergentSum("double sum does not terminate in r");
      const long e = lead(m, r);
      if (e > order) {
        if (lead(m, r + 1) > e && lead(m, r + 2) > lead(m, r + 1)) break;
        continue;
      }
      row_used = true;
      std::int64_t c = 1;
      if (ds.weight) c = detail::ipow(ds.weight->coeff, ds.weight->wm * m + ds.weight->wr * r);
      if (c == 0) continue;
      if (e < 0) throw DivergentSum("double sum term with negative exponent");
      IntSeries term(static_cast<std::size_t>(order + 1), 0);
      term[static_cast<std::size_t>(e)] = c;
      if (ds.numer) detail::mul_poch(term, ds.numer->first, ds.numer->second == Index::m ? m : r);
      detail::div_poch(term, ds.denom_m, m);
      detail::div_poch(term, ds.denom_r, r);
      for (std::size_t k = 0; k < total.size(); ++k) total[k] = checked_add(total[k], term[k]);
    }
    if (!row_used) {
      if (++empty_rows >= 2) break;
    } else {
      empty_rows = 0;
    }
  }
  return total;
}

}  // namespace qrr::oracles
