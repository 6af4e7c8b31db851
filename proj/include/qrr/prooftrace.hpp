#pragma once

// Line-by-line replay of the constant-term proofs of Theorems 1-5. Each line
// of a chain is evaluated independently and compared with the line before
// it; lines inside CT[...] are also compared as z-series.

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qrr/builders.hpp"
#include "qrr/catalog.hpp"
#include "qrr/errors.hpp"
#include "qrr/laurentz.hpp"
#include "qrr/qcore.hpp"

namespace qrr {

// (c z^s; q^base)_inf, or its reciprocal.
struct ZFactor {
  Monomial c;
  int z_exp = -1;
  int base = 1;
  bool inverse = false;
};

struct ProofStep {
  int index = 0;
  std::string description;
  std::string justification;
  QLaurent value{0};
  std::optional<ZSeries> zvalue;  // prefactor times the CT argument
  bool pass = true;               // agrees with the previous line
  std::optional<Mismatch> mismatch;
  std::optional<ZMismatch> zmismatch;
  std::optional<bool> window_stable;
};

// A checked statement outside the main chain: alternative readings of a
// printed line, or instance checks a step relies on. Only gating findings
// affect the verdict.
struct Finding {
  std::string description;
  bool gating = false;
  bool holds = false;
  std::string detail;
};

struct ProofTrace {
  int theorem = 0;
  int order = 0;
  std::vector<ProofStep> steps;
  std::vector<Finding> findings;
  bool pass = false;
  std::string error;
};

namespace trace {

// Product form of a CT argument by literal multiplication. Factors whose
// reciprocal never terminates in z are expanded far enough to cover target.
inline ZSeries zproduct(const std::vector<ZFactor>& fs, const QLaurent& scalar, int order, ZWindow target) {
  std::vector<std::optional<int>> depth;
  int natural = 0;
  for (const ZFactor& f : fs) {
    if (!f.c.is_zero() && f.c.q_exp() < 0) throw Error("z-factor with a negative q-exponent");
    depth.push_back(natural_depth(f.c, f.base, f.inverse, order));
    if (depth.back()) natural += *depth.back();
  }
  const int open = natural + std::abs(target.lo) + std::abs(target.hi) + 4;
  ZSeries acc = ZSeries::constant(scalar);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const ZFactor& f = fs[i];
    acc = zmul(acc, zpochhammer_literal(f.c, f.z_exp, f.base, f.inverse, order, depth[i] ? *depth[i] : open));
  }
  return acc;
}

// Sum form: bilateral sum times one-sided cofactor expansions.
inline ZSeries zsum(const ThetaSpec& theta, const std::vector<Cofactor>& cofs, const QLaurent& scalar, int order, int pad) {
  ZSeries acc = bilateral_theta(theta, order, pad);
  const int span = acc.window().hi - acc.window().lo + 2 + pad;
  for (const Cofactor& cf : cofs) {
    const ZWindow w = cf.z_exp > 0 ? ZWindow{0, span} : ZWindow{-span, 0};
    acc = zmul(acc, cofactor_series(cf, order, w));
  }
  return acc.scaled(scalar);
}

// Every coefficient known in a must be known in b and agree.
inline bool extends(const ZSeries& a, const ZSeries& b) {
  for (int k = a.window().lo; k <= a.window().hi; ++k) {
    if (!b.known(k) || a.coeff(k) != b.coeff(k)) return false;
  }
  return true;
}

// sum_{m>=0} term(m) where term(m) starts at q^lead(m), lead increasing.
inline QLaurent outer_sum(const std::function<QLaurent(long)>& term, const std::function<long(long)>& lead, int order) {
  QLaurent total(order);
  for (long m = 0;; ++m) {
    if (lead(m) > order) {
      if (lead(m + 1) > lead(m)) break;
      continue;
    }
    total += term(m);
  }
  return total;
}

inline Monomial mono(long c, int e) { return Monomial(Rational(c), e); }

inline QLaurent prod(const std::vector<build::Factor>& fs, int order) { return build::product(fs, order); }

inline std::string mismatch_text(const std::optional<Mismatch>& m) {
  if (!m) return "equal";
  std::ostringstream os;
  os << "differs at q^" << m->q_exp << ": " << m->lhs.get_str() << " vs " << m->rhs.get_str();
  return os.str();
}

// Builders for one theorem. scalar and bracket are mutually exclusive.
struct StepDef {
  std::string description;
  std::string justification;
  std::function<QLaurent()> scalar;
  std::function<ZSeries(int pad)> bracket;
};

struct FindingDef {
  std::string description;
  bool gating = false;
  std::function<std::pair<bool, std::string>()> check;
};

struct Plan {
  std::vector<StepDef> steps;
  std::vector<FindingDef> findings;
};

// Finding that an alternative reading of a CT line equals (or not) a value.
inline FindingDef alt_bracket(std::string text, std::function<ZSeries()> alt, std::function<QLaurent()> want) {
  return {std::move(text), false, [alt, want] {
            const QLaurent got = ct(alt());
            const auto mm = first_difference(got, want());
            return std::make_pair(!mm, mismatch_text(mm));
          }};
}

inline FindingDef alt_scalar(std::string text, std::function<QLaurent()> alt, std::function<QLaurent()> want, bool gating = false) {
  return {std::move(text), gating, [alt, want] {
            const auto mm = first_difference(alt(), want());
            return std::make_pair(!mm, mismatch_text(mm));
          }};
}

inline Plan theorem1(int n) {
  using build::Factor;
  const ThetaSpec theta{1, mono(1, 1), mono(-1, 1), 2};
  const ThetaSpec theta0{1, mono(1, 1), Monomial(), 2};
  const ZWindow target = detail::theta_plan(theta, n, 0, std::nullopt).window;
  auto win = [target](int pad) { return ZWindow{target.lo - pad, target.hi + pad}; };
  const QLaurent one = QLaurent::one(n);
  auto pre = [n] { return prod({{mono(-1, 1), 2, -1}}, n); };
  // (zq;q^2)(z^-1 q;q^2)(q^2;q^2): the numerator of the triple product.
  auto core = [] { return std::vector<ZFactor>{{mono(1, 1), 1, 2, false}, {mono(1, 1), -1, 2, false}}; };
  auto with = [](std::vector<ZFactor> a, std::vector<ZFactor> b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  auto line2 = [=](const Monomial& b_over_t, int pad) {
    return zproduct(with(core(), {{b_over_t, -1, 2, true}, {mono(-1, 2), -1, 4, false}}),
                    prod({{mono(1, 2), 2, 1}, {mono(-1, 1), 2, -1}}, n), n, win(pad));
  };
  Plan p;
  p.steps = {
      {"sum (-1)^n q^(3n^2) / ((q^4;q^4)_n (-q;q^2)_n)", "theorem statement",
       [n] { return find_identity("E11").lhs(n, {}); }, nullptr},
      {"CT[ sum_n (-1)^n q^(n^2) z^n / (-q;q^2)_n * sum_m z^-m q^(2m^2) / (q^4;q^4)_m ]", "constant term introduced", nullptr,
       [=](int pad) { return zsum(theta, {Cofactor::euler(mono(1, 2), -1, 4)}, one, n, pad); }},
      {"CT[ (zq;q^2)(z^-1 q;q^2)(q^2;q^2) / ((-z^-1;q^2)(-q;q^2)) * (-z^-1 q^2;q^4) ]",
       "triple product and Euler; printed with (-z^-1 q;q^2) in the denominator, see findings", nullptr,
       [=](int pad) { return line2(mono(-1, 0), pad); }},
      {"1/(-q;q^2) CT[ (zq;q^2)(z^-1 q;q^2)(q^2;q^2) * (-z^-1 q^2;q^4) / (-z^-1;q^2) ]", "prefactor pulled out", nullptr,
       [=](int pad) {
         return zproduct(with(core(), {{mono(-1, 2), -1, 4, false}, {mono(-1, 0), -1, 2, true}}),
                         prod({{mono(1, 2), 2, 1}}, n), n, win(pad))
             .scaled(pre());
       }},
      {"1/(-q;q^2) CT[ (zq;q^2)(z^-1 q;q^2)(q^2;q^2) / (-z^-1;q^4) ]", "(-z^-1;q^2) = (-z^-1;q^4)(-z^-1 q^2;q^4)", nullptr,
       [=](int pad) {
         return zproduct(with(core(), {{mono(-1, 0), -1, 4, true}}), prod({{mono(1, 2), 2, 1}}, n), n, win(pad)).scaled(pre());
       }},
      {"1/(-q;q^2) CT[ sum_n (-1)^n q^(n^2) z^n * sum_m (-1)^m z^-m / (q^4;q^4)_m ]", "triple product and q-binomial theorem",
       nullptr,
       [=](int pad) { return zsum(theta0, {Cofactor::q_binomial(Monomial(), mono(-1, 0), -1, 4)}, pre(), n, pad); }},
      {"1/(-q;q^2) sum q^(n^2) / (q^4;q^4)_n", "constant term extracted",
       [=] { return pre() * find_identity("E6").lhs(n, {}); }, nullptr},
      {"1/(-q;q^2) * G(q) / (-q^2;q^2)", "mod-5 companion identity",
       [=] { return pre() * detail::rr1_sum(n) * prod({{mono(-1, 2), 2, -1}}, n); }, nullptr},
      {"G(q) / (-q)_inf", "(-q)_inf = (-q;q^2)(-q^2;q^2)", [=] { return detail::rr1_sum(n) * prod({{mono(-1, 1), 1, -1}}, n); },
       nullptr},
      {"prod 1 / ((1+q^n)(1-q^(5n-4))(1-q^(5n-1)))", "first Rogers-Ramanujan identity",
       [n] { return find_identity("E11").rhs(n, {}); }, nullptr},
  };
  p.findings = {
      alt_bracket("printed line 2 reading with (-z^-1 q;q^2) in the denominator", [=] { return line2(mono(-1, 1), 0); },
                  [n] { return find_identity("E11").lhs(n, {}); }),
  };
  return p;
}

inline Plan theorem2(int n) {
  const ThetaSpec theta{1, mono(1, 1), mono(-1, 1), 2};
  const ThetaSpec theta0{1, mono(1, 1), Monomial(), 2};
  const ZWindow target = detail::theta_plan(theta, n, 0, std::nullopt).window;
  auto win = [target](int pad) { return ZWindow{target.lo - pad, target.hi + pad}; };
  const QLaurent one = QLaurent::one(n);
  auto pre = [n] { return prod({{mono(-1, 1), 2, -1}}, n); };
  const std::vector<ZFactor> core{{mono(1, 1), 1, 2, false}, {mono(1, 1), -1, 2, false}};
  auto line2 = [=](const Monomial& b_over_t, int pad) {
    std::vector<ZFactor> fs = core;
    fs.push_back({b_over_t, -1, 2, true});
    fs.push_back({mono(-1, 0), -1, 4, false});
    return zproduct(fs, prod({{mono(1, 2), 2, 1}, {mono(-1, 1), 2, -1}}, n), n, win(pad));
  };
  Plan p;
  p.steps = {
      {"sum (-1)^n q^(3n^2-2n) / ((q^4;q^4)_n (-q;q^2)_n)", "theorem statement",
       [n] { return find_identity("E12").lhs(n, {}); }, nullptr},
      {"CT[ sum_n (-1)^n q^(n^2) z^n / (-q;q^2)_n * sum_m z^-m q^(2m^2-2m) / (q^4;q^4)_m ]", "constant term introduced",
       nullptr, [=](int pad) { return zsum(theta, {Cofactor::euler(mono(1, 0), -1, 4)}, one, n, pad); }},
      {"CT[ (zq;q^2)(z^-1 q;q^2)(q^2;q^2) / ((-z^-1;q^2)(-q;q^2)) * (-z^-1;q^4) ]",
       "triple product and Euler; printed with (-z^-1 q;q^2) in the denominator, see findings", nullptr,
       [=](int pad) { return line2(mono(-1, 0), pad); }},
      {"1/(-q;q^2) CT[ (zq;q^2)(z^-1 q;q^2)(q^2;q^2) / (-z^-1 q^2;q^4) ]", "(-z^-1;q^2) = (-z^-1;q^4)(-z^-1 q^2;q^4)", nullptr,
       [=](int pad) {
         std::vector<ZFactor> fs = core;
         fs.push_back({mono(-1, 2), -1, 4, true});
         return zproduct(fs, prod({{mono(1, 2), 2, 1}}, n), n, win(pad)).scaled(pre());
       }},
      {"1/(-q;q^2) CT[ sum_n (-1)^n q^(n^2) z^n * sum_m (-1)^m z^-m q^(2m) / (q^4;q^4)_m ]",
       "triple product and q-binomial theorem", nullptr,
       [=](int pad) { return zsum(theta0, {Cofactor::q_binomial(Monomial(), mono(-1, 2), -1, 4)}, pre(), n, pad); }},
      {"1/(-q;q^2) sum q^(n^2+2n) / (q^4;q^4)_n", "constant term extracted",
       [=] { return pre() * find_identity("E7").lhs(n, {}); }, nullptr},
      {"1/(-q;q^2) * H(q) / (-q^2;q^2)", "mod-5 companion identity",
       [=] { return pre() * detail::rr2_sum(n) * prod({{mono(-1, 2), 2, -1}}, n); }, nullptr},
      {"H(q) / (-q)_inf", "(-q)_inf = (-q;q^2)(-q^2;q^2)", [=] { return detail::rr2_sum(n) * prod({{mono(-1, 1), 1, -1}}, n); },
       nullptr},
      {"prod 1 / ((1+q^n)(1-q^(5n-3))(1-q^(5n-2)))", "second Rogers-Ramanujan identity",
       [n] { return find_identity("E12").rhs(n, {}); }, nullptr},
  };
  p.findings = {
      alt_bracket("printed line 2 reading with (-z^-1 q;q^2) in the denominator", [=] { return line2(mono(-1, 1), 0); },
                  [n] { return find_identity("E12").lhs(n, {}); }),
  };
  return p;
}

inline Plan theorem3(int n) {
  const ThetaSpec theta{1, mono(-1, 1), mono(-1, 2), 2};
  const ThetaSpec theta0{1, mono(-1, 1), Monomial(), 2};
  const ZWindow target = detail::theta_plan(theta, n, 0, std::nullopt).window;
  auto win = [target](int pad) { return ZWindow{target.lo - pad, target.hi + pad}; };
  const QLaurent one = QLaurent::one(n);
  auto pre = [n] { return prod({{mono(-1, 2), 2, -1}}, n); };
  // (-zq;q^2)(-z^-1 q;q^2)(q^2;q^2)
  const std::vector<ZFactor> core{{mono(-1, 1), 1, 2, false}, {mono(-1, 1), -1, 2, false}};
  auto line5 = [=](bool printed, int pad) {
    std::vector<ZFactor> fs = core;
    fs.push_back({mono(-1, 1), -1, 2, false});
    fs.push_back({printed ? mono(-1, 1) : mono(1, 1), -1, 2, true});
    fs.push_back({mono(1, 0), -1, 2, true});
    return zproduct(fs, prod({{mono(1, 2), 2, 1}}, n), n, win(pad)).scaled(pre());
  };
  // (-1;q^2)_m q^(m^2+m) / (q^2;q^2)_m as a series
  auto outer = [n](long m) {
    return QLaurent::monomial(mono(1, static_cast<int>(m * m + m)), n) * pochhammer_finite(mono(-1, 0), 2, static_cast<int>(m), n) *
           pochhammer_finite_inverse(mono(1, 2), 2, static_cast<int>(m), n);
  };
  auto inner = [n](long m) {
    return build::single_sum({[m](long r) { return r * r + 2 * m * r; }, mono(1, 0), {}, {{mono(1, 2), 2}}}, n);
  };
  auto lead = [](long m) { return m * m + m; };
  auto e8_mod6 = [n](bool printed) {
    std::vector<build::Factor> fs{{mono(1, 3), printed ? 3 : 6, 2}, {mono(1, 6), 6, 1}, {mono(-1, 1), 2, 1}, {mono(1, 2), 2, -1}};
    return prod(fs, n);
  };
  auto double_sum = [n](bool printed) {
    return build::double_sum({[printed](long m, long r) { return (m + r) * (m + r) + (printed ? 0 : m); }, mono(1, 0), mono(1, 0),
                              {mono(1, 2), 2}, {mono(1, 2), 2}, build::Poch{mono(-1, 0), 2}},
                             n);
  };
  Plan p;
  p.steps = {
      {"(q^3;q^6)^2 (q^6;q^6) (-q;q^2) / (q^2;q^2)",
       "printed as (q^3;q^3)_inf^2, which is false; the mod-6 form used here matches the assumed identity, see findings",
       [=] { return e8_mod6(false); }, nullptr},
      {"sum q^(n^2) (-q;q^2)_n / (q^4;q^4)_n", "assumed mod-6 identity", [n] { return find_identity("E8").lhs(n, {}); }, nullptr},
      {"sum q^(n^2) (-q;q^2)_n / ((-q^2;q^2)_n (q^2;q^2)_n)", "(q^4;q^4)_n = (-q^2;q^2)_n (q^2;q^2)_n",
       [n] {
         return build::single_sum(
             {[](long k) { return k * k; }, mono(1, 0), {{mono(-1, 1), 2}}, {{mono(-1, 2), 2}, {mono(1, 2), 2}}}, n);
       },
       nullptr},
      {"CT[ sum_n q^(n^2) z^n / (-q^2;q^2)_n * sum_m z^-m (-q;q^2)_m / (q^2;q^2)_m ]", "constant term introduced", nullptr,
       [=](int pad) { return zsum(theta, {Cofactor::q_binomial(mono(-1, 1), mono(1, 0), -1, 2)}, one, n, pad); }},
      {"CT[ (-zq;q^2)(-z^-1 q;q^2)(q^2;q^2) / ((z^-1 q;q^2)(-q^2;q^2)) * (-z^-1 q;q^2) / (z^-1;q^2) ]",
       "triple product and q-binomial theorem", nullptr,
       [=](int pad) {
         std::vector<ZFactor> fs = core;
         fs.push_back({mono(1, 1), -1, 2, true});
         fs.push_back({mono(-1, 1), -1, 2, false});
         fs.push_back({mono(1, 0), -1, 2, true});
         return zproduct(fs, prod({{mono(1, 2), 2, 1}, {mono(-1, 2), 2, -1}}, n), n, win(pad));
       }},
      {"1/(-q^2;q^2) CT[ (-zq;q^2)(-z^-1 q;q^2)(q^2;q^2) * (-z^-1 q;q^2)/(z^-1 q;q^2) * 1/(z^-1;q^2) ]",
       "prefactor pulled out; printed ratio (-z^-1 q;q^2)/(-z^-1 q;q^2), see findings", nullptr,
       [=](int pad) { return line5(false, pad); }},
      {"1/(-q^2;q^2) CT[ sum_n q^(n^2) z^n * sum_m (-1;q^2)_m z^-m q^m / (q^2;q^2)_m * sum_r z^-r / (q^2;q^2)_r ]",
       "triple product and q-binomial theorem (twice)", nullptr,
       [=](int pad) {
         return zsum(theta0,
                     {Cofactor::q_binomial(mono(-1, 0), mono(1, 1), -1, 2), Cofactor::q_binomial(Monomial(), mono(1, 0), -1, 2)},
                     pre(), n, pad);
       }},
      {"1/(-q^2;q^2) sum_{m,r} q^((m+r)^2+m) (-1;q^2)_m / ((q^2;q^2)_m (q^2;q^2)_r)",
       "constant term extracted; printed without the factor q^m, see findings", [=] { return pre() * double_sum(false); },
       nullptr},
      {"1/(-q^2;q^2) sum_m q^(m^2+m) (-1;q^2)_m / (q^2;q^2)_m * sum_r q^(r^2+2mr) / (q^2;q^2)_r", "regrouped by m",
       [=] { return pre() * outer_sum([=](long m) { return outer(m) * inner(m); }, lead, n); }, nullptr},
      {"1/(-q^2;q^2) sum_m q^(m^2+m) (-1;q^2)_m / (q^2;q^2)_m * (-q^(2m+1);q^2)_inf",
       "Euler; the printed (q^2;q^2_m is read as (q^2;q^2)_m",
       [=] {
         return pre() * outer_sum([=](long m) { return outer(m) * prod({{mono(-1, static_cast<int>(2 * m + 1)), 2, 1}}, n); },
                                  lead, n);
       },
       nullptr},
      {"(-q;q^2)/(-q^2;q^2) sum_m q^(m^2+m) (-1;q^2)_m / ((q^2;q^2)_m (-q;q^2)_m)", "(-q^(2m+1);q^2) = (-q;q^2)/(-q;q^2)_m",
       [=] { return pre() * prod({{mono(-1, 1), 2, 1}}, n) * find_identity("E13").lhs(n, {}); }, nullptr},
      {"(-q;q^2)/(-q^2;q^2) * prod (1-q^(6n-3))^2 (1-q^(6n)) / ((1-q^(4n-2))(1-q^(2n)))", "theorem statement",
       [=] { return pre() * prod({{mono(-1, 1), 2, 1}}, n) * find_identity("E13").rhs(n, {}); }, nullptr},
  };
  p.findings = {
      alt_scalar("printed first line with (q^3;q^3)_inf^2", [=] { return e8_mod6(true); },
                 [n] { return find_identity("E8").lhs(n, {}); }),
      alt_bracket("printed line 6 ratio (-z^-1 q;q^2)/(-z^-1 q;q^2)", [=] { return line5(true, 0); },
                  [n] { return find_identity("E8").lhs(n, {}); }),
      alt_scalar("printed double sum exponent (m+r)^2 without q^m", [=] { return pre() * double_sum(true); },
                 [n] { return find_identity("E8").lhs(n, {}); }),
      {"Euler instance: sum_r q^(r^2+2mr)/(q^2;q^2)_r = (-q^(2m+1);q^2)_inf for every m with m^2+m <= N", true,
       [=] {
         for (long m = 0; lead(m) <= n; ++m) {
           const auto mm = first_difference(inner(m), prod({{mono(-1, static_cast<int>(2 * m + 1)), 2, 1}}, n));
           if (mm) return std::make_pair(false, "m=" + std::to_string(m) + ": " + mismatch_text(mm));
         }
         return std::make_pair(true, std::string("equal"));
       }},
  };
  return p;
}

inline Plan theorem4(int n) {
  const ThetaSpec theta{1, mono(-1, 1), mono(1, 2), 4};
  const ThetaSpec theta0{1, mono(-1, 1), Monomial(), 4};
  const ZWindow target = detail::theta_plan(theta, n, 0, std::nullopt).window;
  auto win = [target](int pad) { return ZWindow{target.lo - pad, target.hi + pad}; };
  const QLaurent one = QLaurent::one(n);
  auto pre = [n] { return prod({{mono(1, 2), 4, -1}}, n); };
  auto line3 = [=](int qt_base, int pad) {
    std::vector<ZFactor> fs{{mono(-1, 1), 1, 4, false},    {mono(-1, 3), -1, qt_base, false}, {mono(-1, 1), -1, 4, true},
                            {mono(-1, 1), -1, 2, false}, {mono(1, 0), -1, 2, true}};
    return zproduct(fs, prod({{mono(1, 4), 4, 1}, {mono(1, 2), 4, -1}}, n), n, win(pad));
  };
  auto dsum = [n](int m_base, bool expanded) {
    build::DoubleSum ds{expanded ? std::function<long(long, long)>([](long m, long r) { return 4 * m * m + 4 * m * r + 2 * r * r - r; })
                                 : std::function<long(long, long)>([](long m, long r) {
                                     return 2 * (m + r) * (m + r) - (m + r) + 2 * m * m + m;
                                   }),
                        mono(1, 0), mono(1, 0), {mono(1, m_base), m_base}, {mono(1, 2), 2}, std::nullopt};
    return build::double_sum(ds, n);
  };
  Plan p;
  p.steps = {
      {"(-q)_inf", "partitions into distinct parts", [n] { return prod({{mono(-1, 1), 1, 1}}, n); }, nullptr},
      {"sum q^(2n^2-n) (-q;q^2)_n / ((q^2;q^2)_n (q^2;q^4)_n)", "assumed identity for (-q)_inf",
       [n] { return find_identity("E9").lhs(n, {}); }, nullptr},
      {"CT[ sum_n q^(2n^2-n) z^n / (q^2;q^4)_n * sum_m z^-m (-q;q^2)_m / (q^2;q^2)_m ]", "constant term introduced", nullptr,
       [=](int pad) { return zsum(theta, {Cofactor::q_binomial(mono(-1, 1), mono(1, 0), -1, 2)}, one, n, pad); }},
      {"CT[ (-zq;q^4)(-z^-1 q^3;q^4)(q^4;q^4) / ((-z^-1 q;q^4)(q^2;q^4)) * (-z^-1 q;q^2) / (z^-1;q^2) ]",
       "triple product and q-binomial theorem; printed with base q^2 in (-z^-1 q^3;.), see findings", nullptr,
       [=](int pad) { return line3(4, pad); }},
      {"1/(q^2;q^4) CT[ (-zq;q^4)(-z^-1 q^3;q^4)(q^4;q^4) * (-z^-1 q^3;q^4) / (z^-1;q^2) ]",
       "(-z^-1 q;q^2) = (-z^-1 q;q^4)(-z^-1 q^3;q^4)", nullptr,
       [=](int pad) {
         std::vector<ZFactor> fs{{mono(-1, 1), 1, 4, false}, {mono(-1, 3), -1, 4, false}, {mono(-1, 3), -1, 4, false},
                                 {mono(1, 0), -1, 2, true}};
         return zproduct(fs, prod({{mono(1, 4), 4, 1}}, n), n, win(pad)).scaled(pre());
       }},
      {"1/(q^2;q^4) CT[ sum_n q^(2n^2-n) z^n * sum_m q^(2m^2+m) z^-m / (q^4;q^4)_m * sum_r z^-r / (q^2;q^2)_r ]",
       "triple product, Euler and q-binomial theorem; printed with a spurious (-1)^n, see findings", nullptr,
       [=](int pad) {
         return zsum(theta0, {Cofactor::euler(mono(1, 3), -1, 4), Cofactor::q_binomial(Monomial(), mono(1, 0), -1, 2)}, pre(), n,
                     pad);
       }},
      {"1/(q^2;q^4) sum_{m,r} q^(2(m+r)^2-(m+r)+2m^2+m) / ((q^4;q^4)_m (q^2;q^2)_r)",
       "constant term extracted; printed with (q^2;q^2)_m, see findings", [=] { return pre() * dsum(4, false); }, nullptr},
      {"1/(q^2;q^4) sum_{m,r} q^(4m^2+4mr+2r^2-r) / ((q^4;q^4)_m (q^2;q^2)_r)", "exponent expanded",
       [=] { return pre() * dsum(4, true); }, nullptr},
      {"1/(q^2;q^4) * prod (1+q^(2n-1))", "theorem statement", [=] { return pre() * find_identity("E17").rhs(n, {}); }, nullptr},
  };
  p.findings = {
      alt_bracket("printed line 3 base: (-z^-1 q^3;q^2) in place of (-z^-1 q^3;q^4)", [=] { return line3(2, 0); },
                  [n] { return find_identity("E9").lhs(n, {}); }),
      alt_bracket("printed line 5 sign: (-1)^n q^(2n^2-n) z^n",
                  [=] {
                    return zsum(ThetaSpec{1, mono(1, 1), Monomial(), 4},
                                {Cofactor::euler(mono(1, 3), -1, 4), Cofactor::q_binomial(Monomial(), mono(1, 0), -1, 2)}, pre(),
                                n, 0);
                  },
                  [n] { return find_identity("E9").lhs(n, {}); }),
      alt_scalar("printed denominator (q^2;q^2)_m in the double sum", [=] { return pre() * dsum(2, true); },
                 [n] { return find_identity("E9").lhs(n, {}); }),
  };
  return p;
}

inline Plan theorem5(int n) {
  const ThetaSpec theta{1, mono(-1, 1), mono(1, 3), 2};
  const ThetaSpec theta0{1, mono(-1, 1), Monomial(), 2};
  const ZWindow target = detail::theta_plan(theta, n, 0, std::nullopt).window;
  auto win = [target](int pad) { return ZWindow{target.lo - pad, target.hi + pad}; };
  auto pre = [n] { return prod({{mono(1, 1), 2, -1}}, n); };
  const QLaurent inv_one_minus_q = div_one_minus(QLaurent::one(n), mono(1, 1));
  const std::vector<ZFactor> core{{mono(-1, 1), 1, 2, false}, {mono(-1, 1), -1, 2, false}};
  auto dsum = [n](bool expanded) {
    build::DoubleSum ds{expanded ? std::function<long(long, long)>([](long m, long r) { return 2 * m * m + 2 * m * r + r * r; })
                                 : std::function<long(long, long)>([](long m, long r) { return (m + r) * (m + r) + m * m; }),
                        mono(1, 0), mono(1, 0), {mono(1, 2), 2}, {mono(1, 1), 1}, std::nullopt};
    return build::double_sum(ds, n);
  };
  Plan p;
  p.steps = {
      {"(q^3;q^6)^2 (q^6;q^6) (-q)_inf / (q)_inf", "assumed mod-6 identity", [n] { return find_identity("E10").rhs(n, {}); },
       nullptr},
      {"sum q^(n^2) (-q)_n / ((q;q^2)_(n+1) (q)_n)", "assumed mod-6 identity", [n] { return find_identity("E10").lhs(n, {}); },
       nullptr},
      {"CT[ 1/(1-q) sum_n q^(n^2) z^n / (q^3;q^2)_n * sum_m z^-m (-q)_m / (q)_m ]", "constant term introduced", nullptr,
       [=](int pad) { return zsum(theta, {Cofactor::q_binomial(mono(-1, 1), mono(1, 0), -1, 1)}, inv_one_minus_q, n, pad); }},
      {"CT[ (-zq;q^2)(-z^-1 q;q^2)(q^2;q^2) / ((-z^-1 q^2;q^2)(q;q^2)) * (-z^-1 q)_inf / (z^-1)_inf ]",
       "triple product and q-binomial theorem", nullptr,
       [=](int pad) {
         std::vector<ZFactor> fs = core;
         fs.push_back({mono(-1, 2), -1, 2, true});
         fs.push_back({mono(-1, 1), -1, 1, false});
         fs.push_back({mono(1, 0), -1, 1, true});
         return zproduct(fs, prod({{mono(1, 2), 2, 1}, {mono(1, 1), 2, -1}}, n), n, win(pad));
       }},
      {"1/(q;q^2) CT[ (-zq;q^2)(-z^-1 q;q^2)(q^2;q^2) * (-z^-1 q;q^2) / (z^-1)_inf ]", "(-z^-1 q)_inf = (-z^-1 q;q^2)(-z^-1 q^2;q^2)",
       nullptr,
       [=](int pad) {
         std::vector<ZFactor> fs = core;
         fs.push_back({mono(-1, 1), -1, 2, false});
         fs.push_back({mono(1, 0), -1, 1, true});
         return zproduct(fs, prod({{mono(1, 2), 2, 1}}, n), n, win(pad)).scaled(pre());
       }},
      {"1/(q;q^2) CT[ sum_n q^(n^2) z^n * sum_m q^(m^2) z^-m / (q^2;q^2)_m * sum_r z^-r / (q)_r ]",
       "triple product, Euler and q-binomial theorem", nullptr,
       [=](int pad) {
         return zsum(theta0, {Cofactor::euler(mono(1, 1), -1, 2), Cofactor::q_binomial(Monomial(), mono(1, 0), -1, 1)}, pre(), n,
                     pad);
       }},
      {"1/(q;q^2) sum_{m,r} q^((m+r)^2+m^2) / ((q^2;q^2)_m (q)_r)", "constant term extracted",
       [=] { return pre() * dsum(false); }, nullptr},
      {"1/(q;q^2) sum_{m,r} q^(2m^2+2mr+r^2) / ((q^2;q^2)_m (q)_r)", "exponent expanded", [=] { return pre() * dsum(true); },
       nullptr},
      {"1/(q;q^2) * prod (1-q^(6n-3))^2 (1-q^(6n)) / (1-q^n)", "theorem statement",
       [=] { return pre() * find_identity("E18").rhs(n, {}); }, nullptr},
  };
  return p;
}

}  // namespace trace

inline ProofTrace run_trace(int theorem, int order) {
  if (order < 0) throw Error("order must be nonnegative");
  trace::Plan plan;
  switch (theorem) {
    case 1: plan = trace::theorem1(order); break;
    case 2: plan = trace::theorem2(order); break;
    case 3: plan = trace::theorem3(order); break;
    case 4: plan = trace::theorem4(order); break;
    case 5: plan = trace::theorem5(order); break;
    default: throw Error("no proof trace for theorem " + std::to_string(theorem) + " (expected 1..5)");
  }
  ProofTrace out;
  out.theorem = theorem;
  out.order = order;
  out.pass = true;
  try {
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
      const trace::StepDef& d = plan.steps[i];
      ProofStep st;
      st.index = static_cast<int>(i);
      st.description = d.description;
      st.justification = d.justification;
      if (d.bracket) {
        const ZSeries z = d.bracket(0);
        st.value = ct(z);
        st.window_stable = trace::extends(z, d.bracket(2));
        st.zvalue = z;
      } else {
        st.value = d.scalar();
      }
      if (i > 0) {
        const ProofStep& prev = out.steps.back();
        st.mismatch = first_difference(prev.value, st.value);
        if (prev.zvalue && st.zvalue) st.zmismatch = compare(*prev.zvalue, *st.zvalue);
        st.pass = !st.mismatch && !st.zmismatch;
      }
      if (st.window_stable && !*st.window_stable) st.pass = false;
      out.pass = out.pass && st.pass;
      out.steps.push_back(std::move(st));
    }
    for (const auto& f : plan.findings) {
      const auto [holds, detail] = f.check();
      out.findings.push_back({f.description, f.gating, holds, detail});
      if (f.gating && !holds) out.pass = false;
    }
  } catch (const Error& e) {
    out.pass = false;
    out.error = e.what();
  }
  return out;
}

inline std::string format_trace(const ProofTrace& t) {
  std::ostringstream os;
  os << "Theorem " << t.theorem << " through q^" << t.order << ": " << (t.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& s : t.steps) {
    os << "  " << (s.index == 0 ? "   " : " = ") << "[" << s.index << "] " << s.description << "\n";
    os << "        " << (s.pass ? "ok" : "FAIL") << "  (" << s.justification << ")";
    if (s.zvalue) {
      os << "  z-window [" << s.zvalue->window().lo << ", " << s.zvalue->window().hi << "]";
      if (s.window_stable) os << (*s.window_stable ? ", stable" : ", UNSTABLE");
    }
    os << "\n";
    if (s.mismatch) os << "        " << trace::mismatch_text(s.mismatch) << "\n";
    if (s.zmismatch)
      os << "        z^" << s.zmismatch->z_exp << " q^" << s.zmismatch->q_exp << ": " << s.zmismatch->lhs.get_str() << " vs "
         << s.zmismatch->rhs.get_str() << "\n";
  }
  for (const auto& f : t.findings)
    os << "  finding" << (f.gating ? " (gating)" : "") << ": " << f.description << ": " << (f.holds ? "holds" : "fails")
       << " [" << f.detail << "]\n";
  if (!t.error.empty()) os << "  error: " << t.error << "\n";
  return os.str();
}

}  // namespace qrr
