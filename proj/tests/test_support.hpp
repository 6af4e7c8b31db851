#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "qrr/qcore.hpp"

namespace qrr::testing {

// Integer coefficients for q^lo, q^(lo+1), ...
inline QLaurent series(std::vector<long> coeffs, int order, int lo = 0) {
  std::map<int, Rational> t;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (coeffs[i] != 0) t.emplace(lo + static_cast<int>(i), Rational(coeffs[i]));
  return QLaurent::from_terms(t, order);
}

inline QLaurent series(const std::vector<std::int64_t>& coeffs) {
  std::map<int, Rational> t;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (coeffs[i] != 0) t.emplace(static_cast<int>(i), Rational(static_cast<long>(coeffs[i])));
  return QLaurent::from_terms(t, static_cast<int>(coeffs.size()) - 1);
}

inline Monomial mono(long c, int e) { return Monomial(Rational(c), e); }

// Random sparse series with small rational coefficients.
class SeriesGen {
 public:
  explicit SeriesGen(std::uint32_t seed) : rng_(seed) {}

  QLaurent any(int order, int min_exp = 0, int max_terms = 6) {
    std::uniform_int_distribution<int> nterms(0, max_terms);
    std::uniform_int_distribution<int> exps(min_exp, order);
    std::map<int, Rational> t;
    const int n = nterms(rng_);
    for (int i = 0; i < n; ++i) t[exps(rng_)] = small_rational();
    return QLaurent::from_terms(t, order);
  }

  // Nonzero constant term, no negative powers.
  QLaurent unit(int order, bool integral_pm1 = false) {
    QLaurent s = any(order, 1);
    Rational c0 = integral_pm1 ? Rational(coin() ? 1 : -1) : nonzero_rational();
    if (integral_pm1) {
      auto t = s.terms();
      for (auto& [e, c] : t) c = Rational(small_int());
      t[0] = c0;
      return QLaurent::from_terms(t, order);
    }
    return s + QLaurent::constant(c0, order);
  }

  Monomial monomial(int lo, int hi) {
    std::uniform_int_distribution<int> e(lo, hi);
    return Monomial(nonzero_rational(), e(rng_));
  }

  long small_int() { return std::uniform_int_distribution<long>(-4, 4)(rng_); }
  bool coin() { return std::uniform_int_distribution<int>(0, 1)(rng_) == 1; }
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Rational small_rational() {
    Rational r(small_int(), std::uniform_int_distribution<long>(1, 3)(rng_));
    r.canonicalize();
    return r;
  }
  Rational nonzero_rational() {
    Rational r;
    do r = small_rational();
    while (r == 0);
    return r;
  }

 private:
  std::mt19937 rng_;
};

}  // namespace qrr::testing
