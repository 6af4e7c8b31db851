#pragma once

// Laurent series in an auxiliary variable z with truncated q-series
// coefficients, the builders for bilateral and one-sided z-expansions, and
// constant-term extraction.
//
// A ZSeries stores coefficients for z-exponents in [lo, hi]. Each side of the
// window carries a closure flag: a closed side means every coefficient beyond
// it is zero through q^N. A series closed on both sides is anchored. Open
// sides arise from one-sided expansions such as 1/(z^-1; q^2)_inf whose
// coefficients never leave low q-degree; products only report the z-range
// they can determine exactly.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qrr/errors.hpp"
#include "qrr/qcore.hpp"

namespace qrr {

struct ZWindow {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const ZWindow&, const ZWindow&) = default;
};

class ZSeries {
 public:
  ZSeries(int order, ZWindow window, bool closed_lo, bool closed_hi)
      : order_(order), window_(window), closed_lo_(closed_lo), closed_hi_(closed_hi) {
    if (window.lo > window.hi) throw Error("empty z-window");
  }

  // A z-free series placed at z^0.
  static ZSeries constant(const QLaurent& s) {
    ZSeries out(s.order(), {0, 0}, true, true);
    out.set(0, s);
    return out;
  }

  static ZSeries z_monomial(int z_exp, const QLaurent& s) {
    ZSeries out(s.order(), {z_exp, z_exp}, true, true);
    out.set(z_exp, s);
    return out;
  }

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] ZWindow window() const { return window_; }
  [[nodiscard]] bool closed_lo() const { return closed_lo_; }
  [[nodiscard]] bool closed_hi() const { return closed_hi_; }
  [[nodiscard]] bool anchored() const { return closed_lo_ && closed_hi_; }
  [[nodiscard]] const std::map<int, QLaurent>& coeffs() const { return coeffs_; }

  // True when the coefficient of z^k is determined through q^N.
  [[nodiscard]] bool known(int k) const {
    if (k >= window_.lo && k <= window_.hi) return true;
    return k < window_.lo ? closed_lo_ : closed_hi_;
  }

  [[nodiscard]] QLaurent coeff(int k) const {
    if (!known(k))
      throw WindowUnderspecified("coefficient of z^" + std::to_string(k) + " lies outside an open window side");
    auto it = coeffs_.find(k);
    return it == coeffs_.end() ? QLaurent(order_) : it->second;
  }

  void set(int k, const QLaurent& c) {
    if (k < window_.lo || k > window_.hi) throw Error("z-exponent outside window");
    if (c.order() != order_) throw OrderMismatch(order_, c.order());
    if (c.is_zero()) coeffs_.erase(k);
    else coeffs_.insert_or_assign(k, c);
  }

  // Narrows the window; a side stays closed only if nothing nonzero was cut.
  [[nodiscard]] ZSeries restricted(ZWindow w) const {
    if (w.lo < window_.lo || w.hi > window_.hi) throw WindowUnderspecified("restriction must lie inside the window");
    bool cl = closed_lo_, ch = closed_hi_;
    ZSeries out(order_, w, cl, ch);
    for (const auto& [k, c] : coeffs_) {
      if (k < w.lo) out.closed_lo_ = false;
      else if (k > w.hi) out.closed_hi_ = false;
      else out.coeffs_.emplace(k, c);
    }
    return out;
  }

  // Smallest q-exponent among coefficients in the window (order+1 if none).
  [[nodiscard]] int min_q_degree() const {
    int m = order_ + 1;
    for (const auto& [k, c] : coeffs_) m = std::min(m, c.min_exp());
    return m;
  }

  [[nodiscard]] ZSeries scaled(const QLaurent& s) const {
    ZSeries out(order_, window_, closed_lo_, closed_hi_);
    for (const auto& [k, c] : coeffs_) out.set(k, c * s);
    return out;
  }

  [[nodiscard]] ZSeries truncated(int new_order) const {
    ZSeries out(new_order, window_, closed_lo_, closed_hi_);
    for (const auto& [k, c] : coeffs_) out.set(k, c.truncated(new_order));
    return out;
  }

  [[nodiscard]] std::string str() const {
    std::ostringstream os;
    os << "ZSeries[order " << order_ << ", z in " << (closed_lo_ ? "[" : "(") << window_.lo << ", " << window_.hi
       << (closed_hi_ ? "]" : ")") << "]";
    for (const auto& [k, c] : coeffs_) os << "\n  z^" << k << ": " << c.str(6);
    return os.str();
  }

 private:
  int order_;
  ZWindow window_;
  bool closed_lo_;
  bool closed_hi_;
  std::map<int, QLaurent> coeffs_;
};

inline ZSeries zadd(const ZSeries& a, const ZSeries& b, bool subtract = false) {
  if (a.order() != b.order()) throw OrderMismatch(a.order(), b.order());
  ZWindow w{std::min(a.window().lo, b.window().lo), std::max(a.window().hi, b.window().hi)};
  // The sum is known only where both summands are.
  while (w.lo <= w.hi && !(a.known(w.lo) && b.known(w.lo))) ++w.lo;
  while (w.hi >= w.lo && !(a.known(w.hi) && b.known(w.hi))) --w.hi;
  if (w.lo > w.hi) throw WindowUnderspecified("sum of z-series has no common known range");
  const bool cl = a.closed_lo() && b.closed_lo() && w.lo == std::min(a.window().lo, b.window().lo);
  const bool ch = a.closed_hi() && b.closed_hi() && w.hi == std::max(a.window().hi, b.window().hi);
  ZSeries out(a.order(), w, cl, ch);
  for (int k = w.lo; k <= w.hi; ++k) out.set(k, subtract ? a.coeff(k) - b.coeff(k) : a.coeff(k) + b.coeff(k));
  return out;
}

// Product in z. The result window is the set of z-exponents whose
// coefficient is fully determined by the operands' known ranges; an explicit
// window must lie inside it.
inline ZSeries zmul(const ZSeries& a, const ZSeries& b, std::optional<ZWindow> explicit_window = std::nullopt) {
  if (a.order() != b.order()) throw OrderMismatch(a.order(), b.order());
  const ZWindow wa = a.window(), wb = b.window();
  int lo = wa.lo + wb.lo, hi = wa.hi + wb.hi;
  auto underspecified = [] {
    return WindowUnderspecified("product of z-series open on opposite sides has no determined coefficients");
  };
  if (!b.closed_lo()) {
    if (!a.closed_hi()) throw underspecified();
    lo = std::max(lo, wa.hi + wb.lo);
  }
  if (!b.closed_hi()) {
    if (!a.closed_lo()) throw underspecified();
    hi = std::min(hi, wa.lo + wb.hi);
  }
  if (!a.closed_lo()) {
    if (!b.closed_hi()) throw underspecified();
    lo = std::max(lo, wb.hi + wa.lo);
  }
  if (!a.closed_hi()) {
    if (!b.closed_lo()) throw underspecified();
    hi = std::min(hi, wb.lo + wa.hi);
  }
  if (lo > hi) throw WindowUnderspecified("z-series product has an empty determined range");
  bool cl = a.closed_lo() && b.closed_lo();
  bool ch = a.closed_hi() && b.closed_hi();
  if (explicit_window) {
    if (explicit_window->lo < lo || explicit_window->hi > hi)
      throw WindowUnderspecified("requested window exceeds the determined range of the product");
    cl = cl && explicit_window->lo == lo;
    ch = ch && explicit_window->hi == hi;
    lo = explicit_window->lo;
    hi = explicit_window->hi;
  }
  std::map<int, QLaurent> acc;
  for (const auto& [i, ca] : a.coeffs()) {
    for (const auto& [j, cb] : b.coeffs()) {
      const int k = i + j;
      if (k < lo || k > hi) continue;
      auto prod = ca * cb;
      auto it = acc.find(k);
      if (it == acc.end()) acc.emplace(k, std::move(prod));
      else it->second += prod;
    }
  }
  ZSeries out(a.order(), {lo, hi}, cl, ch);
  for (auto& [k, c] : acc) out.set(k, c);
  return out;
}

// Coefficient of z^0.
inline QLaurent ct(const ZSeries& a) { return a.coeff(0); }

struct ZMismatch {
  int z_exp = 0;
  int q_exp = 0;
  Rational lhs;
  Rational rhs;
};

// First coefficient where two z-series differ, over every z-exponent known
// in both. Throws if they share no known exponent.
inline std::optional<ZMismatch> compare(const ZSeries& a, const ZSeries& b) {
  if (a.order() != b.order()) throw OrderMismatch(a.order(), b.order());
  const int lo = std::min(a.window().lo, b.window().lo);
  const int hi = std::max(a.window().hi, b.window().hi);
  bool any = false;
  for (int k = lo; k <= hi; ++k) {
    if (!a.known(k) || !b.known(k)) continue;
    any = true;
    const QLaurent ca = a.coeff(k), cb = b.coeff(k);
    if (ca == cb) continue;
    const QLaurent d = ca - cb;
    const int e = d.min_exp();
    return ZMismatch{k, e, ca.coeff(e), cb.coeff(e)};
  }
  if (!any) throw WindowUnderspecified("z-series share no determined coefficient");
  return std::nullopt;
}

namespace detail {

// m * X where X has no negative powers: X is built at the reduced order
// N - m.q_exp and shifted into order N.
inline QLaurent monomial_times(const Monomial& m, const std::function<QLaurent(int)>& build_tail, int order) {
  if (m.is_zero()) return QLaurent(order);
  const long reduced = static_cast<long>(order) - m.q_exp();
  if (reduced < 0) return QLaurent(order);
  const QLaurent tail = build_tail(static_cast<int>(reduced));
  std::map<int, Rational> t;
  for (const auto& [e, c] : tail.terms()) t.emplace(e + m.q_exp(), c * m.coeff());
  return QLaurent::from_terms(t, order);
}

inline long binom2(long n) { return n * (n - 1) / 2; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Bilateral theta-type sums.

// Parameters of sum_n (-1)^n Q^binom(n,2) (t z^t_zexp)^n / (b; Q)_n with
// Q = q^base.
struct ThetaSpec {
  int t_zexp = 1;
  Monomial t;
  Monomial b;
  int base = 1;
};

namespace detail {

// Exact coefficient of the n-th bilateral term. For n = -k < 0 the
// denominator is (b;Q)_{-k} = 1/(b Q^-k; Q)_k, a finite polynomial that is
// expanded without truncation before the shift.
inline QLaurent theta_term(const ThetaSpec& s, long n, int order) {
  const Monomial sign(n % 2 == 0 ? 1 : -1, 0);
  const Monomial lead = sign * Monomial(1, static_cast<int>(s.base * binom2(n))) * s.t.pow(n);
  if (n >= 0) {
    return monomial_times(
        lead,
        [&](int w) {
          try {
            return pochhammer_finite_inverse(s.b, s.base, static_cast<int>(n), w);
          } catch (const NotInvertible&) {
            throw SingularTerm("bilateral term n=" + std::to_string(n) + " has a vanishing denominator factor (" + s.b.str() +
                               "; q^" + std::to_string(s.base) + ")");
          }
        },
        order);
  }
  const long k = -n;
  if (s.b.is_zero()) return monomial_times(lead, [](int w) { return QLaurent::one(w); }, order);
  // (b Q^-k; Q)_k = prod_{j=1..k} (1 - b Q^-j)
  std::map<int, Rational> poly{{0, Rational(1)}};
  for (long j = 1; j <= k; ++j) {
    const Monomial f = s.b * Monomial(1, static_cast<int>(-s.base * j));
    std::map<int, Rational> next = poly;
    for (const auto& [e, c] : poly) {
      auto& slot = next[e + f.q_exp()];
      slot -= c * f.coeff();
    }
    poly.clear();
    for (auto& [e, c] : next)
      if (c != 0) poly.emplace(e, c);
  }
  std::map<int, Rational> t;
  for (const auto& [e, c] : poly) {
    const long ex = static_cast<long>(e) + lead.q_exp();
    if (ex <= order) t.emplace(static_cast<int>(ex), c * lead.coeff());
  }
  return QLaurent::from_terms(t, order);
}

// Exact leading q-degree of the n-th bilateral term, or nullopt when the
// term is identically zero (a vanishing factor in (b Q^-k; Q)_k).
inline std::optional<long> theta_lead_degree(const ThetaSpec& s, long n) {
  long d = s.base * detail::binom2(n) + n * s.t.q_exp();
  if (s.b.is_zero()) return d;
  if (n >= 0) {
    for (long j = 0; j < n; ++j) d += std::max(0L, -(s.b.q_exp() + s.base * j));
    return d;
  }
  for (long j = 1; j <= -n; ++j) {
    const long f = s.b.q_exp() - s.base * j;
    if (f == 0 && s.b.coeff() == 1) return std::nullopt;
    d += std::min(0L, f);
  }
  return d;
}

// Extent of one side of a bilateral sum: the last n (in direction dir) whose
// term survives truncation, and whether every term beyond it vanishes.
struct ThetaSide {
  long extent = 0;
  bool closed = true;
};

// Scans outward until the leading degree exceeds N twice in a row while
// nondecreasing. Sides whose degrees stop growing are open; sides whose
// degrees fall without bound have no formal expansion.
inline ThetaSide theta_side(const ThetaSpec& s, int order, int dir) {
  const long cap = 8L * (order + 8) + 64;
  auto deg = [&](long n) { return theta_lead_degree(s, n); };
  long last = 0;
  int quiet = 0;
  for (long n = dir;; n += dir) {
    if (std::labs(n) > cap) throw DivergentSum("bilateral sum does not terminate");
    const auto d = deg(n);
    if (!d) return {last, true};  // every later term contains the same zero factor
    const auto next = deg(n + dir);
    const long slope = next ? *next - *d : 0;
    if (*d > order) {
      if (++quiet >= 2 && (!next || slope >= 0)) return {last, true};
      continue;
    }
    quiet = 0;
    last = n;
    // The increments are nondecreasing in |n| and constant once the
    // b-factors are all dominated by their q-power; at that point a
    // nonpositive increment never recovers.
    const bool settled = dir > 0 ? (s.b.is_zero() || s.b.q_exp() + s.base * n >= 0)
                                 : (s.b.is_zero() ? false : s.base * (-n + 1) >= s.b.q_exp());
    if (settled && next && slope < 0 && dir < 0 && !s.b.is_zero())
      throw DivergentSum("bilateral sum terms decrease in degree without bound");
    if (settled && next && slope == 0 && dir < 0 && !s.b.is_zero()) return {last, false};
  }
}

}  // namespace detail

// Expansion of the bilateral sum over an automatically chosen z-window. Each
// side grows outward from n = 0 until two consecutive terms vanish through
// q^N; `pad` evaluates that many further terms on each side (used to confirm
// window stability). A side whose terms never vanish (b/t free of q, as in
// the bilateral factor of the mod-5 proofs) is left open and expanded to
// `open_depth` terms, defaulting to the extent of the other side.
namespace detail {

struct ThetaPlan {
  long n_lo = 0;
  long n_hi = 0;
  ZWindow window;
  bool closed_lo = true;
  bool closed_hi = true;
};

inline ThetaPlan theta_plan(const ThetaSpec& s, int order, int pad, std::optional<int> open_depth) {
  if (s.t_zexp == 0) throw Error("bilateral sum: z must appear in t");
  if (s.base < 1) throw Error("bilateral sum: base must be positive");
  if (s.t.is_zero()) throw Error("bilateral sum: t must be nonzero");
  if (s.b.coeff() == 1 && s.b.q_exp() <= 0 && (-s.b.q_exp()) % s.base == 0)
    throw SingularTerm("bilateral sum: (" + s.b.str() + "; q^" + std::to_string(s.base) + ")_n vanishes for large n");
  const ThetaSide up = theta_side(s, order, +1);
  const ThetaSide down = theta_side(s, order, -1);
  const long fallback = std::max(2L, std::max(up.closed ? up.extent : 0, down.closed ? -down.extent : 0)) + pad;
  ThetaPlan p;
  p.n_hi = up.closed ? up.extent + pad : (open_depth ? *open_depth : fallback);
  p.n_lo = down.closed ? down.extent - pad : -(open_depth ? *open_depth : fallback);
  const long z1 = p.n_lo * s.t_zexp, z2 = p.n_hi * s.t_zexp;
  p.window = {static_cast<int>(std::min(z1, z2)), static_cast<int>(std::max(z1, z2))};
  p.closed_lo = s.t_zexp > 0 ? down.closed : up.closed;
  p.closed_hi = s.t_zexp > 0 ? up.closed : down.closed;
  return p;
}

}  // namespace detail

inline ZSeries bilateral_theta(const ThetaSpec& s, int order, int pad = 0, std::optional<int> open_depth = std::nullopt) {
  const detail::ThetaPlan p = detail::theta_plan(s, order, pad, open_depth);
  ZSeries out(order, p.window, p.closed_lo, p.closed_hi);
  for (long n = p.n_lo; n <= p.n_hi; ++n) out.set(static_cast<int>(n * s.t_zexp), detail::theta_term(s, n, order));
  return out;
}

inline ZSeries bilateral_theta(int t_zexp, const Monomial& t, const Monomial& b, int base, int order, int pad = 0) {
  return bilateral_theta(ThetaSpec{t_zexp, t, b, base}, order, pad);
}

// ---------------------------------------------------------------------------
// One-sided expansions.

// sum_m (a;Q)_m (t z^s)^m / (Q;Q)_m = (a t z^s; Q)_inf / (t z^s; Q)_inf   (q-binomial)
// sum_m Q^binom(m,2) (t z^s)^m / (Q;Q)_m = (-t z^s; Q)_inf                (Euler)
struct Cofactor {
  enum class Kind { q_binomial, euler };
  Kind kind = Kind::q_binomial;
  Monomial a;
  Monomial t;
  int z_exp = -1;
  int base = 1;

  static Cofactor q_binomial(Monomial a, Monomial t, int z_exp, int base) {
    return {Kind::q_binomial, std::move(a), std::move(t), z_exp, base};
  }
  static Cofactor euler(Monomial t, int z_exp, int base) { return {Kind::euler, Monomial(), std::move(t), z_exp, base}; }

  void validate() const {
    if (z_exp != 1 && z_exp != -1) throw Error("one-sided expansion needs z exponent +1 or -1");
    if (base < 1) throw Error("one-sided expansion base must be positive");
    if (!a.is_zero() && a.q_exp() < 0) throw Error("q-binomial parameter a must not carry negative powers of q");
  }

  // Coefficient of z^(z_exp * m).
  [[nodiscard]] QLaurent coefficient(long m, int order) const {
    Monomial lead = t.pow(m);
    if (kind == Kind::euler) lead = lead * Monomial(1, static_cast<int>(base * detail::binom2(m)));
    return detail::monomial_times(
        lead,
        [&](int w) {
          QLaurent x = pochhammer_finite_inverse(Monomial(1, base), base, static_cast<int>(m), w);
          if (kind == Kind::q_binomial) x *= pochhammer_finite(a, base, static_cast<int>(m), w);
          return x;
        },
        order);
  }

  // Lower bound on the q-degree of coefficient m; exact when a is not 1.
  [[nodiscard]] long degree_bound(long m) const {
    if (t.is_zero()) return m == 0 ? 0 : 1L << 40;
    long d = m * t.q_exp();
    if (kind == Kind::euler) d += base * detail::binom2(m);
    return d;
  }

  // True when every coefficient beyond m = depth vanishes through q^N.
  [[nodiscard]] bool tail_vanishes(long depth, int order) const {
    if (t.is_zero()) return true;
    const long next = depth + 1;
    const long slope = kind == Kind::euler ? t.q_exp() + static_cast<long>(base) * next : t.q_exp();
    return degree_bound(next) > order && slope >= 0;
  }
};

// One-sided z-series of a cofactor over the caller-supplied z-window. The
// side facing away from the support is closed; the support side is closed
// only if the coefficient degrees provably exceed N beyond the window.
inline ZSeries cofactor_series(const Cofactor& cf, int order, std::optional<ZWindow> window) {
  cf.validate();
  if (!window) throw WindowUnderspecified("one-sided expansions need an explicit z-window");
  const ZWindow w = *window;
  if (w.lo > w.hi) throw Error("empty z-window");
  const int s = cf.z_exp;
  const long m_lo = std::max<long>(0, s > 0 ? w.lo : -w.hi);
  const long m_hi = s > 0 ? w.hi : -w.lo;
  bool support_closed = true;
  if (m_hi < 0) support_closed = false;
  else if (!cf.tail_vanishes(m_hi, order)) support_closed = false;
  bool near_open = m_lo > 0;  // m in [0, m_lo) was cut off
  bool cl = s > 0 ? !near_open : support_closed;
  bool ch = s > 0 ? support_closed : !near_open;
  ZSeries out(order, w, cl, ch);
  for (long m = m_lo; m <= m_hi; ++m) out.set(static_cast<int>(s * m), cf.coefficient(m, order));
  return out;
}

// (-c z^z_exp; Q)_inf (numerator) or 1/(c z^z_exp; Q)_inf (denominator) as a
// series in z, via the Euler and q-binomial expansions.
inline ZSeries product_expansion(const Monomial& c, int z_exp, int base, bool numerator, int order,
                                 std::optional<ZWindow> window) {
  const Cofactor cf = numerator ? Cofactor::euler(c, z_exp, base) : Cofactor::q_binomial(Monomial(), c, z_exp, base);
  return cofactor_series(cf, order, window);
}

// Depth beyond which the one-sided Pochhammer in z has vanishing
// coefficients through q^N, if it exists.
inline std::optional<int> natural_depth(const Monomial& c, int base, bool inverse, int order) {
  const Cofactor cf = inverse ? Cofactor::q_binomial(Monomial(), c, -1, base) : Cofactor::euler(-c, -1, base);
  if (c.is_zero()) return 0;
  if (inverse && c.q_exp() <= 0) return std::nullopt;
  for (int m = 0; m <= 4 * (order + 8); ++m)
    if (cf.tail_vanishes(m, order)) return m;
  return std::nullopt;
}

// (c z^z_exp; q^base)_inf, or its reciprocal, by literal multiplication of
// the factors (1 - c q^(e + base j) z^z_exp) restricted to |z-degree| <= depth.
// This route never uses the Euler or q-binomial expansions.
inline ZSeries zpochhammer_literal(const Monomial& c, int z_exp, int base, bool inverse, int order, int depth) {
  if (z_exp != 1 && z_exp != -1) throw Error("literal z-pochhammer needs z exponent +1 or -1");
  if (base < 1) throw Error("pochhammer base must be positive");
  if (depth < 0) throw Error("depth must be nonnegative");
  const int s = z_exp;
  auto window = [&](int d) { return s > 0 ? ZWindow{0, d} : ZWindow{-d, 0}; };
  if (c.is_zero()) {
    ZSeries out(order, window(depth), true, true);
    out.set(0, QLaurent::one(order));
    return out;
  }
  const int e = c.q_exp();
  if (inverse && e < 0) throw DivergentProduct("reciprocal z-pochhammer with negative q-exponent has no formal expansion");
  long slack = 0;
  if (!inverse)
    for (long j = 0; e + base * j < 0; ++j) slack -= e + base * j;
  const int work = order + static_cast<int>(slack);
  std::vector<QLaurent> p(static_cast<std::size_t>(depth + 1), QLaurent(work));
  p[0] = QLaurent::one(work);
  for (long j = 0; e + base * j <= work; ++j) {
    const Monomial x = c * Monomial(1, static_cast<int>(base * j));
    if (inverse) {
      for (int m = 1; m <= depth; ++m) p[m] += scale_monomial(p[m - 1], x);
    } else {
      for (int m = depth; m >= 1; --m) p[m] -= scale_monomial(p[m - 1], x);
    }
  }
  bool tail;
  if (inverse) tail = e > 0 && static_cast<long>(depth + 1) * e > order;
  else tail = static_cast<long>(depth + 1) * e + base * detail::binom2(depth + 1) > order && e + static_cast<long>(base) * (depth + 1) >= 0;
  ZSeries out(order, window(depth), s > 0 || tail, s < 0 || tail);
  for (int m = 0; m <= depth; ++m) out.set(s * m, p[m].truncated(order));
  return out;
}

// Product side of the bilateral sum,
//   (t;Q)_inf (Q/t;Q)_inf (Q;Q)_inf / ((b/t;Q)_inf (b;Q)_inf),
// every z-bearing factor expanded by literal multiplication. The window and
// side closure follow the plan of the sum side so the two are comparable.
inline ZSeries triple_product_form(const ThetaSpec& s, int order, int pad = 0, std::optional<int> open_depth = std::nullopt) {
  if (s.t_zexp != 1 && s.t_zexp != -1) throw Error("triple_product_form needs t linear in z");
  if (s.t.is_zero()) throw Error("triple_product_form: t must be nonzero");
  const int sz = s.t_zexp;
  const Monomial t = s.t;
  const Monomial q_over_t = Monomial(1, s.base) / t;
  const Monomial b_over_t = s.b.is_zero() ? Monomial() : s.b / t;
  if (!b_over_t.is_zero() && b_over_t.q_exp() < 0)
    throw DivergentProduct("(b/t; Q)_inf has a negative q-exponent and no formal expansion in z");

  // Same window bookkeeping as the sum side, so the two can be compared.
  const detail::ThetaPlan plan = detail::theta_plan(s, order, pad, open_depth);
  const ZWindow target = plan.window;

  long slack = 0;
  for (const Monomial& m : {t, q_over_t})
    for (long j = 0; m.q_exp() + s.base * j < 0; ++j) slack -= m.q_exp() + s.base * j;
  const int work = order + static_cast<int>(slack);

  auto depth_for = [&](const Monomial& c) {
    auto d = natural_depth(c, s.base, false, work);
    if (!d) throw DivergentProduct("z-pochhammer factor does not stabilize");
    return *d;
  };
  const int d1 = depth_for(t), d2 = depth_for(q_over_t);
  const int d4 = d1 + d2 + std::max(std::abs(target.lo), std::abs(target.hi)) + 4;
  const QLaurent zfree = pochhammer_infinite(Monomial(1, s.base), s.base, work) *
                         pochhammer_infinite_inverse(s.b, s.base, work);
  const ZSeries core = zmul(zpochhammer_literal(t, sz, s.base, false, work, d1),
                            zpochhammer_literal(q_over_t, -sz, s.base, false, work, d2));
  const ZSeries full = zmul(core, zpochhammer_literal(b_over_t, -sz, s.base, true, work, d4)).scaled(zfree).truncated(order);
  ZSeries out(order, target, plan.closed_lo, plan.closed_hi);
  for (int k = target.lo; k <= target.hi; ++k) {
    if (!full.known(k)) throw WindowUnderspecified("product side does not determine z^" + std::to_string(k));
    out.set(k, full.coeff(k));
  }
  return out;
}

inline ZSeries triple_product_form(int t_zexp, const Monomial& t, const Monomial& b, int base, int order, int pad = 0) {
  return triple_product_form(ThetaSpec{t_zexp, t, b, base}, order, pad);
}

// ---------------------------------------------------------------------------
// Constant-term recipes.

// prefactor * CT[ theta(anchored) * prod(cofactors) ]
struct CTRecipe {
  ThetaSpec anchored;
  std::vector<Cofactor> cofactors;
  std::optional<QLaurent> prefactor;
};

// Evaluates a recipe by pairing each anchored coefficient at z^k with the
// convolution of the cofactors at z^-k. Cofactor products are never
// materialized as z-series.
inline QLaurent ct_recipe(const CTRecipe& r, int order) {
  if (r.prefactor && r.prefactor->order() != order) throw OrderMismatch(order, r.prefactor->order());
  const ZSeries theta = bilateral_theta(r.anchored, order);
  if (theta.min_q_degree() < 0) throw Error("anchored factor has negative q-degrees; truncation would be inexact");
  int side = 0;
  for (const auto& cf : r.cofactors) {
    cf.validate();
    if (side != 0 && cf.z_exp != side) throw WindowUnderspecified("cofactors supported on opposite z-sides");
    side = cf.z_exp;
  }
  // Cofactors on the z^-m side pair with the theta's upper side, which must close.
  if ((side < 0 && !theta.closed_hi()) || (side > 0 && !theta.closed_lo()) || (side == 0 && !theta.known(0)))
    throw WindowUnderspecified("theta side paired with the cofactors is not closed");
  // conv[m]: coefficient of z^(side*m) in the cofactor product.
  int depth = 0;
  for (const auto& [k, c] : theta.coeffs())
    if (side == 0 ? k == 0 : -k * side >= 0) depth = std::max(depth, side == 0 ? 0 : -k * side);
  std::vector<QLaurent> conv(static_cast<std::size_t>(depth + 1), QLaurent(order));
  conv[0] = QLaurent::one(order);
  for (const auto& cf : r.cofactors) {
    std::vector<QLaurent> coef;
    coef.reserve(conv.size());
    for (int m = 0; m <= depth; ++m) coef.push_back(cf.coefficient(m, order));
    std::vector<QLaurent> next(conv.size(), QLaurent(order));
    for (int i = 0; i <= depth; ++i) {
      if (conv[i].is_zero()) continue;
      for (int j = 0; i + j <= depth; ++j)
        if (!coef[j].is_zero()) next[i + j] += conv[i] * coef[j];
    }
    conv = std::move(next);
  }
  QLaurent total(order);
  for (const auto& [k, c] : theta.coeffs()) {
    if (side == 0) {
      if (k == 0) total += c;
      continue;
    }
    const int m = -k * side;
    if (m >= 0) total += c * conv[static_cast<std::size_t>(m)];
  }
  return r.prefactor ? total * *r.prefactor : total;
}

// The same recipe through explicit z-series products (ct o zmul), used to
// cross-check ct_recipe.
inline QLaurent ct_recipe_via_zmul(const CTRecipe& r, int order) {
  ZSeries acc = bilateral_theta(r.anchored, order);
  const int span = acc.window().hi - acc.window().lo + 2;
  for (const auto& cf : r.cofactors) {
    const ZWindow w = cf.z_exp > 0 ? ZWindow{0, span} : ZWindow{-span, 0};
    acc = zmul(acc, cofactor_series(cf, order, w));
  }
  QLaurent out = ct(acc);
  return r.prefactor ? out * *r.prefactor : out;
}

}  // namespace qrr
