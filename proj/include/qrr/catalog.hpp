#pragma once

// Named identities with independently built sides and a uniform verifier.

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrr/builders.hpp"
#include "qrr/errors.hpp"
#include "qrr/laurentz.hpp"
#include "qrr/qcore.hpp"

namespace qrr {

// Parameter assignment for a parametric identity, e.g. {"t": q^2}.
using Sample = std::map<std::string, Monomial>;

inline std::string sample_str(const Sample& s) {
  std::string out;
  for (const auto& [k, v] : s) out += (out.empty() ? "" : ", ") + k + "=" + v.str();
  return out;
}

struct Identity {
  std::string id;
  std::string citation;
  std::string notes;
  std::vector<std::string> params;
  std::function<QLaurent(int, const Sample&)> lhs;
  std::function<QLaurent(int, const Sample&)> rhs;
  std::vector<Sample> samples{};
  int default_order = 60;

  [[nodiscard]] bool parametric() const { return !params.empty(); }
};

struct Mismatch {
  int q_exp = 0;
  Rational lhs;
  Rational rhs;
  std::string sample;
};

struct VerifyReport {
  std::string id;
  int order = 0;
  bool pass = false;
  std::optional<Mismatch> first_mismatch;
  double elapsed_ms = 0;
  bool integrality = true;
  int samples_checked = 0;
  std::string error;  // builder failure, if any
};

inline std::optional<Mismatch> first_difference(const QLaurent& a, const QLaurent& b) {
  if (a.order() != b.order()) throw OrderMismatch(a.order(), b.order());
  const int lo = std::min(a.min_exp(), b.min_exp());
  for (int e = lo; e <= a.order(); ++e)
    if (a.coeff(e) != b.coeff(e)) return Mismatch{e, a.coeff(e), b.coeff(e), {}};
  return std::nullopt;
}

namespace detail {

inline Monomial m(long c, int e) { return Monomial(Rational(c), e); }
inline const Monomial& param(const Sample& s, const std::string& name) {
  auto it = s.find(name);
  if (it == s.end()) throw Error("missing sample value for " + name);
  return it->second;
}

inline QLaurent rr1_sum(int n) {
  return build::single_sum({[](long k) { return k * k; }, m(1, 0), {}, {{m(1, 1), 1}}}, n);
}
inline QLaurent rr2_sum(int n) {
  return build::single_sum({[](long k) { return k * k + k; }, m(1, 0), {}, {{m(1, 1), 1}}}, n);
}
inline QLaurent rr1_product(int n) { return build::product({{m(1, 1), 5, -1}, {m(1, 4), 5, -1}}, n); }
inline QLaurent rr2_product(int n) { return build::product({{m(1, 2), 5, -1}, {m(1, 3), 5, -1}}, n); }

// (q^3;q^6)^2 (q^6;q^6)
inline std::vector<build::Factor> mod6_theta() { return {{m(1, 3), 6, 2}, {m(1, 6), 6, 1}}; }

inline std::vector<build::Factor> cat(std::vector<build::Factor> a, const std::vector<build::Factor>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::vector<Sample> grid(const std::vector<std::pair<std::string, std::vector<Monomial>>>& axes,
                                const std::function<bool(const Sample&)>& keep) {
  std::vector<Sample> out{{}};
  for (const auto& [name, values] : axes) {
    std::vector<Sample> next;
    for (const auto& s : out)
      for (const auto& v : values) {
        Sample t = s;
        t[name] = v;
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  std::vector<Sample> kept;
  for (auto& s : out)
    if (keep(s)) kept.push_back(std::move(s));
  return kept;
}

// Sum over every z-coefficient of the bilateral sum: the z-free evaluation at
// z = 1. Only meaningful when both sides of the window close.
inline QLaurent bilateral_at_one(const Monomial& t, const Monomial& b, int n) {
  const ZSeries s = bilateral_theta(ThetaSpec{1, t, b, 1}, n);
  if (!s.anchored()) throw DivergentSum("bilateral sum does not terminate on both sides");
  QLaurent total = QLaurent::zero(n);
  for (const auto& [k, c] : s.coeffs()) total += c;
  return total;
}

inline std::vector<Identity> make_catalog() {
  using build::Factor;
  using build::Poch;
  using build::single_sum;
  using build::product;
  std::vector<Identity> c;

  c.push_back({"RR1", "first Rogers-Ramanujan identity", "G(q); parts congruent to 1 or 4 mod 5", {},
               [](int n, const Sample&) { return rr1_sum(n); }, [](int n, const Sample&) { return rr1_product(n); }});
  c.push_back({"RR2", "second Rogers-Ramanujan identity", "H(q); parts congruent to 2 or 3 mod 5", {},
               [](int n, const Sample&) { return rr2_sum(n); }, [](int n, const Sample&) { return rr2_product(n); }});

  c.push_back({"E3", "q-binomial theorem", "sum (a)_n t^n/(q)_n = (at)_inf/(t)_inf", {"a", "t"},
               [](int n, const Sample& s) {
                 return single_sum({[](long) { return 0L; }, param(s, "t"), {{param(s, "a"), 1}}, {{m(1, 1), 1}}}, n);
               },
               [](int n, const Sample& s) {
                 return product({{param(s, "a") * param(s, "t"), 1, 1}, {param(s, "t"), 1, -1}}, n);
               },
               grid({{"a", {Monomial(), m(1, 1), m(-1, 1), m(1, 2), m(-1, 2), m(1, 3)}},
                     {"t", {m(1, 1), m(-1, 1), m(1, 2), m(1, 3)}}},
                    [](const Sample&) { return true; })});

  c.push_back({"E4", "Jacobi triple product, bilateral form",
               "z-free instance: sum over all n of (-1)^n q^C(n,2) t^n/(b)_n = (t)(q/t)(q)/((b/t)(b))", {"t", "b"},
               [](int n, const Sample& s) { return bilateral_at_one(param(s, "t"), param(s, "b"), n); },
               [](int n, const Sample& s) {
                 const Monomial& t = param(s, "t");
                 const Monomial& b = param(s, "b");
                 return product({{t, 1, 1}, {m(1, 1) / t, 1, 1}, {m(1, 1), 1, 1}, {b / t, 1, -1}, {b, 1, -1}}, n);
               },
               grid({{"t", {m(1, 1), m(-1, 1), m(1, 2), m(-1, 2)}}, {"b", {Monomial(), m(1, 2), m(1, 3), m(-1, 3), m(-1, 4)}}},
                    [](const Sample& s) {
                      const Monomial& t = s.at("t");
                      const Monomial& b = s.at("b");
                      return b.is_zero() || b.q_exp() > t.q_exp();
                    })});

  c.push_back({"E5", "Euler's identity", "sum q^C(n,2) t^n/(q)_n = (-t)_inf", {"t"},
               [](int n, const Sample& s) {
                 return single_sum({[](long k) { return k * (k - 1) / 2; }, param(s, "t"), {}, {{m(1, 1), 1}}}, n);
               },
               [](int n, const Sample& s) { return product({{-param(s, "t"), 1, 1}}, n); },
               grid({{"t", {m(1, 0), m(1, 1), m(-1, 1), m(1, 2), m(-1, 2), m(1, 3), m(2, 1)}}},
                    [](const Sample&) { return true; })});

  c.push_back({"E6", "assumed mod-5 companion, G(q)/(-q^2;q^2)", "G(q)/(-q^2;q^2)_inf", {},
               [](int n, const Sample&) { return single_sum({[](long k) { return k * k; }, m(1, 0), {}, {{m(1, 4), 4}}}, n); },
               [](int n, const Sample&) { return rr1_product(n) * product({{m(-1, 2), 2, -1}}, n); }});
  c.push_back({"E7", "assumed mod-5 companion, H(q)/(-q^2;q^2)", "H(q)/(-q^2;q^2)_inf", {},
               [](int n, const Sample&) {
                 return single_sum({[](long k) { return k * k + 2 * k; }, m(1, 0), {}, {{m(1, 4), 4}}}, n);
               },
               [](int n, const Sample&) { return rr2_product(n) * product({{m(-1, 2), 2, -1}}, n); }});
  c.push_back({"E8", "assumed mod-6 identity with (-q;q^2)_n",
               "RHS printed with (q^3;q^6)^2 lacking the infinity subscript; read as (q^3;q^6)_inf^2", {},
               [](int n, const Sample&) {
                 return single_sum({[](long k) { return k * k; }, m(1, 0), {{m(-1, 1), 2}}, {{m(1, 4), 4}}}, n);
               },
               [](int n, const Sample&) {
                 return product(cat(mod6_theta(), {{m(-1, 1), 2, 1}, {m(1, 2), 2, -1}}), n);
               }});
  c.push_back({"E9", "assumed identity for (-q)_inf", "equals (-q)_inf, partitions into distinct parts", {},
               [](int n, const Sample&) {
                 return single_sum(
                     {[](long k) { return 2 * k * k - k; }, m(1, 0), {{m(-1, 1), 2}}, {{m(1, 2), 2}, {m(1, 2), 4}}}, n);
               },
               [](int n, const Sample&) { return product({{m(-1, 1), 1, 1}}, n); }});
  c.push_back({"E10", "assumed mod-6 identity with (q;q^2)_(n+1)",
               "denominator (q;q^2)_(n+1) taken literally, so the n = 0 term is 1/(1-q); (q^3;q^6)^2 read as infinite",
               {},
               [](int n, const Sample&) {
                 return single_sum(
                     {[](long k) { return k * k; }, m(1, 0), {{m(-1, 1), 1}}, {{m(1, 1), 2, 1}, {m(1, 1), 1}}}, n);
               },
               [](int n, const Sample&) {
                 return product(cat(mod6_theta(), {{m(-1, 1), 1, 1}, {m(1, 1), 1, -1}}), n);
               }});
  c.push_back({"E11", "Theorem 1", "G(q)/(-q)_inf", {},
               [](int n, const Sample&) {
                 return single_sum({[](long k) { return 3 * k * k; }, m(-1, 0), {}, {{m(1, 4), 4}, {m(-1, 1), 2}}}, n);
               },
               [](int n, const Sample&) { return rr1_product(n) * product({{m(-1, 1), 1, -1}}, n); }});
  c.push_back({"E12", "Theorem 2", "H(q)/(-q)_inf", {},
               [](int n, const Sample&) {
                 return single_sum({[](long k) { return 3 * k * k - 2 * k; }, m(-1, 0), {}, {{m(1, 4), 4}, {m(-1, 1), 2}}},
                                   n);
               },
               [](int n, const Sample&) { return rr2_product(n) * product({{m(-1, 1), 1, -1}}, n); }});
  c.push_back({"E13", "Theorem 3", "q -> -q gives a known mod-6 identity", {},
               [](int n, const Sample&) {
                 return single_sum(
                     {[](long k) { return k * k + k; }, m(1, 0), {{m(-1, 0), 2}}, {{m(1, 2), 2}, {m(-1, 1), 2}}}, n);
               },
               [](int n, const Sample&) {
                 return product(cat(mod6_theta(), {{m(1, 2), 4, -1}, {m(1, 2), 2, -1}}), n);
               }});
  c.push_back({"E17", "Theorem 4", "irreducible double sum; partitions into distinct odd parts", {},
               [](int n, const Sample&) {
                 return build::double_sum({[](long a, long r) { return 4 * a * a + 4 * a * r + 2 * r * r - r; }, m(1, 0),
                                           m(1, 0), {m(1, 4), 4}, {m(1, 2), 2}, std::nullopt},
                                          n);
               },
               [](int n, const Sample&) { return product({{m(-1, 1), 2, 1}}, n); }});
  c.push_back({"E18", "Theorem 5", "irreducible double sum", {},
               [](int n, const Sample&) {
                 return build::double_sum({[](long a, long r) { return 2 * a * a + 2 * a * r + r * r; }, m(1, 0), m(1, 0),
                                           {m(1, 2), 2}, {m(1, 1), 1}, std::nullopt},
                                          n);
               },
               [](int n, const Sample&) { return product(cat(mod6_theta(), {{m(1, 1), 1, -1}}), n); }});
  c.push_back({"GG", "Remark after Theorem 4, one-parameter generalization", "reduces to E17 at t = 1", {"t"},
               [](int n, const Sample& s) {
                 const Monomial& t = param(s, "t");
                 return build::double_sum({[](long a, long r) { return 4 * a * a + 4 * a * r + 2 * r * r - r; }, t.pow(2), t,
                                           {m(1, 4), 4}, {m(1, 2), 2}, std::nullopt},
                                          n);
               },
               [](int n, const Sample& s) { return product({{-param(s, "t") * m(1, 1), 2, 1}}, n); },
               grid({{"t", {Monomial(), m(1, 0), m(-1, 0), m(1, 1), m(-1, 1), m(1, 2), m(1, 3), m(2, 0)}}},
                    [](const Sample&) { return true; })});
  std::sort(c.begin(), c.end(), [](const Identity& a, const Identity& b) { return a.id < b.id; });
  return c;
}

}  // namespace detail

// The shipped catalog, sorted by id.
inline const std::vector<Identity>& catalog() {
  static const std::vector<Identity> c = detail::make_catalog();
  return c;
}

inline const Identity& find_identity(const std::string& id) {
  for (const auto& i : catalog())
    if (i.id == id) return i;
  throw UnknownIdentity(id);
}

// Checks both sides at every sample (the default grid when none given).
inline VerifyReport verify(const Identity& ident, int order, const std::vector<Sample>& samples = {}) {
  if (order < 0) throw Error("order must be nonnegative");
  const auto start = std::chrono::steady_clock::now();
  VerifyReport rep;
  rep.id = ident.id;
  rep.order = order;
  std::vector<Sample> use = samples;
  if (use.empty()) use = ident.parametric() ? ident.samples : std::vector<Sample>{Sample{}};
  if (ident.parametric() && use.empty()) throw Error(ident.id + " needs at least one sample");
  rep.pass = true;
  try {
    for (const Sample& s : use) {
      for (const auto& p : ident.params)
        if (!s.count(p)) throw Error(ident.id + ": sample lacks " + p);
      const QLaurent l = ident.lhs(order, s);
      const QLaurent r = ident.rhs(order, s);
      ++rep.samples_checked;
      rep.integrality = rep.integrality && l.is_integral() && r.is_integral();
      if (auto mm = first_difference(l, r)) {
        mm->sample = sample_str(s);
        rep.pass = false;
        rep.first_mismatch = mm;
        break;
      }
    }
  } catch (const Error& e) {
    rep.pass = false;
    rep.error = e.what();
  }
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline VerifyReport verify(const std::string& id, int order, const std::vector<Sample>& samples = {}) {
  return verify(find_identity(id), order, samples);
}

inline std::vector<VerifyReport> verify_all(int order) {
  std::vector<VerifyReport> out;
  for (const auto& i : catalog()) out.push_back(verify(i, order));
  return out;
}

// q -> -q applied to both sides of E13. A substitution-level check only.
inline VerifyReport slater_negation_check(int order, int times = 1) {
  const Identity& base = find_identity("E13");
  Identity neg = base;
  neg.id = "E13-negated";
  neg.lhs = [base, times](int n, const Sample& s) {
    QLaurent v = base.lhs(n, s);
    for (int i = 0; i < times; ++i) v = substitute_negate(v);
    return v;
  };
  neg.rhs = [base, times](int n, const Sample& s) {
    QLaurent v = base.rhs(n, s);
    for (int i = 0; i < times; ++i) v = substitute_negate(v);
    return v;
  };
  return verify(neg, order);
}

}  // namespace qrr
