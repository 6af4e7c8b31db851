#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <vector>

#include "qrr/qcore.hpp"
#include "test_support.hpp"

namespace {

using qrr::Monomial;
using qrr::QLaurent;
using qrr::Rational;
using qrr::testing::mono;
using qrr::testing::series;

// Counts partitions of each k <= order into parts <= max_part by recursive
// enumeration.
std::vector<long> partitions_bounded(int max_part, int order) {
  std::vector<long> out(static_cast<std::size_t>(order + 1), 0);
  std::function<void(int, int)> walk = [&](int total, int largest) {
    out[static_cast<std::size_t>(total)] += 1;
    for (int p = 1; p <= largest && total + p <= order; ++p) walk(total + p, p);
  };
  walk(0, max_part);
  return out;
}

// Counts partitions into distinct parts by enumerating subsets of {1..order}.
std::vector<long> partitions_distinct(int order) {
  std::vector<long> out(static_cast<std::size_t>(order + 1), 0);
  for (unsigned mask = 0; mask < (1u << order); ++mask) {
    int total = 0;
    for (int p = 1; p <= order; ++p)
      if (mask & (1u << (p - 1))) total += p;
    if (total <= order) out[static_cast<std::size_t>(total)] += 1;
  }
  return out;
}

// prod_{k=1..order} (1 - q^k) by schoolbook multiplication.
std::vector<long> euler_product(int order) {
  std::vector<long> p(static_cast<std::size_t>(order + 1), 0);
  p[0] = 1;
  for (int k = 1; k <= order; ++k) {
    std::vector<long> next = p;
    for (int e = k; e <= order; ++e) next[static_cast<std::size_t>(e)] -= p[static_cast<std::size_t>(e - k)];
    p = next;
  }
  return p;
}

TEST(QLaurentArithmetic, AddCancels) {
  EXPECT_EQ(series({1, 1}, 5) + series({1, -1}, 5), series({2}, 5));
  const QLaurent s = series({3, 0, -2, 7}, 5);
  EXPECT_EQ(s + QLaurent::zero(5), s);
  EXPECT_EQ(series({1, 1}, 5, -1) + series({-1}, 5, -1), series({1}, 5));
}

TEST(QLaurentArithmetic, CanonicalFormHasNoZeroCoefficients) {
  const QLaurent s = series({0, 0, 1, 0}, 6, -2);
  EXPECT_EQ(s.min_exp(), 0);
  EXPECT_EQ(s.terms().size(), 1u);
  EXPECT_TRUE((series({1}, 4) - series({1}, 4)).is_zero());
}

TEST(QLaurentArithmetic, MulTruncatesAtOrder) {
  EXPECT_EQ(series({1, 1}, 5) * series({1, -1}, 5), series({1, 0, -1}, 5));
  const QLaurent s = series({2, -1, 0, 4}, 5);
  EXPECT_EQ(s * QLaurent::one(5), s);
  EXPECT_EQ(series({1, 0, 0, 0, 0, 1}, 5) * series({0, 1}, 5), series({0, 1}, 5));
}

TEST(QLaurentArithmetic, MulByInverse) {
  const QLaurent one_minus_q = series({1, -1}, 10);
  EXPECT_EQ(one_minus_q * qrr::inverse(one_minus_q), QLaurent::one(10));
}

TEST(QLaurentArithmetic, OrderMismatchRejected) {
  EXPECT_THROW(series({1}, 3) + series({1}, 4), qrr::OrderMismatch);
  EXPECT_THROW(series({1}, 3) * series({1}, 4), qrr::OrderMismatch);
}

TEST(QLaurentInverse, Examples) {
  EXPECT_EQ(qrr::inverse(series({1, -1}, 4)), series({1, 1, 1, 1, 1}, 4));
  EXPECT_EQ(qrr::inverse(QLaurent::one(7)), QLaurent::one(7));
  const auto counts = partitions_bounded(3, 6);
  EXPECT_EQ(counts, (std::vector<long>{1, 1, 2, 3, 4, 5, 7}));
  EXPECT_EQ(qrr::inverse(qrr::pochhammer_finite(mono(1, 1), 1, 3, 6)), series(counts, 6));
}

TEST(QLaurentInverse, NotInvertible) {
  EXPECT_THROW(qrr::inverse(series({0, 1}, 4)), qrr::NotInvertible);
  EXPECT_THROW(qrr::inverse(QLaurent::zero(4)), qrr::NotInvertible);
  EXPECT_THROW(qrr::inverse(series({1, 1}, 4, -1)), qrr::NotInvertible);
}

TEST(QLaurentScale, Examples) {
  EXPECT_EQ(qrr::scale_monomial(series({1, 1}, 5), mono(1, 2)), series({0, 0, 1, 1}, 5));
  const QLaurent s = series({1, 2, 3}, 5);
  EXPECT_EQ(qrr::scale_monomial(s, mono(1, 0)), s);
  EXPECT_EQ(qrr::scale_monomial(QLaurent::one(5), mono(-1, -1)), series({-1}, 5, -1));
  EXPECT_EQ(qrr::scale_monomial(series({1, 1}, 3), mono(1, 3)), series({0, 0, 0, 1}, 3));
}

TEST(QLaurentSubstitute, Power) {
  EXPECT_EQ(qrr::substitute_power(series({1, 1, 1}, 4), 2), series({1, 0, 1, 0, 1}, 4));
  const QLaurent s = series({1, -3, 2}, 6);
  EXPECT_EQ(qrr::substitute_power(s, 1), s);
  EXPECT_EQ(qrr::substitute_power(qrr::inverse(series({1, -1}, 7)), 3), series({1, 0, 0, 1, 0, 0, 1}, 7));
}

TEST(QLaurentSubstitute, Negate) {
  EXPECT_EQ(qrr::substitute_negate(series({1, 1, 1}, 4)), series({1, -1, 1}, 4));
  EXPECT_EQ(qrr::substitute_negate(series({1, 0, 1}, 4)), series({1, 0, 1}, 4));
  const QLaurent s = series({2, -1, 5, 3}, 6, -1);
  EXPECT_EQ(qrr::substitute_negate(qrr::substitute_negate(s)), s);
}

TEST(Pochhammer, Finite) {
  EXPECT_EQ(qrr::pochhammer_finite(mono(1, 1), 1, 0, 8), QLaurent::one(8));
  EXPECT_EQ(qrr::pochhammer_finite(mono(-1, 1), 2, 2, 8), series({1, 1, 0, 1, 1}, 8));
  // (1-q)(1-q^2)(1-q^3) expanded by schoolbook product.
  std::vector<long> p{1};
  for (int k = 1; k <= 3; ++k) {
    std::vector<long> next(p.size() + static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i] += p[i];
      next[i + static_cast<std::size_t>(k)] -= p[i];
    }
    p = next;
  }
  EXPECT_EQ(qrr::pochhammer_finite(mono(1, 1), 1, 3, 8), series(p, 8));
  EXPECT_EQ(series(p, 8), series({1, -1, -1, 0, 1, 1, -1}, 8));
}

TEST(Pochhammer, ZeroArgumentIsOne) {
  EXPECT_EQ(qrr::pochhammer_finite(Monomial::zero(), 3, 5, 10), QLaurent::one(10));
  EXPECT_EQ(qrr::pochhammer_infinite(Monomial::zero(), 1, 10), QLaurent::one(10));
}

TEST(Pochhammer, Infinite) {
  EXPECT_EQ(qrr::pochhammer_infinite(mono(1, 1), 1, 12), series(euler_product(12), 12));
  EXPECT_EQ(series(euler_product(12), 12), series({1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1}, 12));
  const auto distinct = partitions_distinct(6);
  EXPECT_EQ(distinct, (std::vector<long>{1, 1, 1, 2, 2, 3, 4}));
  EXPECT_EQ(qrr::pochhammer_infinite(mono(-1, 1), 1, 6), series(distinct, 6));
  EXPECT_EQ(qrr::pochhammer_infinite(mono(1, 13), 1, 12), QLaurent::one(12));
}

TEST(Pochhammer, DivergentProduct) {
  EXPECT_THROW(qrr::pochhammer_infinite(mono(1, -1), 1, 10), qrr::DivergentProduct);
  EXPECT_THROW(qrr::pochhammer_infinite(mono(2, 0), 0, 10), qrr::Error);
}

TEST(Pochhammer, InverseMatchesInverseOfProduct) {
  EXPECT_EQ(qrr::pochhammer_finite_inverse(mono(-1, 1), 2, 4, 20),
            qrr::inverse(qrr::pochhammer_finite(mono(-1, 1), 2, 4, 20)));
  EXPECT_EQ(qrr::pochhammer_infinite_inverse(mono(1, 2), 4, 20), qrr::inverse(qrr::pochhammer_infinite(mono(1, 2), 4, 20)));
}

TEST(DivOneMinus, NegativeExponentFactor) {
  // 1/(1 - 2 q^-1) = -(q/2) / (1 - q/2)
  const QLaurent got = qrr::div_one_minus(QLaurent::one(4), mono(2, -1));
  const std::map<int, Rational> want{{1, Rational(-1, 2)}, {2, Rational(-1, 4)}, {3, Rational(-1, 8)}, {4, Rational(-1, 16)}};
  EXPECT_EQ(got, QLaurent::from_terms(want, 4));
  EXPECT_THROW(qrr::div_one_minus(QLaurent::one(4), mono(1, 0)), qrr::NotInvertible);
}

// --- randomized algebra properties -------------------------------------------

constexpr int kCases = 500;
constexpr int kOrder = 30;

TEST(AlgebraProperties, RingAxioms) {
  qrr::testing::SeriesGen gen(20240611);
  for (int i = 0; i < kCases; ++i) {
    const QLaurent a = gen.any(kOrder), b = gen.any(kOrder), c = gen.any(kOrder);
    ASSERT_EQ(a + b, b + a);
    ASSERT_EQ((a + b) + c, a + (b + c));
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a * (b + c), a * b + a * c);
    ASSERT_TRUE((a - a).is_zero());
  }
}

TEST(AlgebraProperties, InverseLaw) {
  qrr::testing::SeriesGen gen(7);
  for (int i = 0; i < kCases; ++i) {
    const QLaurent u = gen.unit(kOrder);
    ASSERT_EQ(u * qrr::inverse(u), QLaurent::one(kOrder)) << u;
  }
}

TEST(AlgebraProperties, InverseIntegralityForUnitConstantTerm) {
  qrr::testing::SeriesGen gen(99);
  for (int i = 0; i < kCases; ++i) {
    const QLaurent u = gen.unit(kOrder, true);
    ASSERT_TRUE(u.is_integral());
    ASSERT_TRUE(qrr::inverse(u).is_integral()) << u;
  }
}

TEST(AlgebraProperties, SubstitutePowerIsHomomorphism) {
  qrr::testing::SeriesGen gen(31337);
  for (int i = 0; i < kCases; ++i) {
    const int k = gen.uniform(1, 4);
    const int inner = kOrder / k;
    const QLaurent a = gen.any(kOrder), b = gen.any(kOrder);
    // Images of values known through q^(N/k) are known through q^N.
    const QLaurent ta = a.truncated(inner), tb = b.truncated(inner);
    auto lift = [&](const QLaurent& s) { return QLaurent::from_terms(s.terms(), kOrder); };
    const QLaurent fa = qrr::substitute_power(lift(ta), k), fb = qrr::substitute_power(lift(tb), k);
    ASSERT_EQ(qrr::substitute_power(lift(ta * tb), k), fa * fb);
    ASSERT_EQ(qrr::substitute_power(lift(ta + tb), k), fa + fb);
  }
}

TEST(AlgebraProperties, PochhammerRecurrence) {
  qrr::testing::SeriesGen gen(4242);
  for (int i = 0; i < kCases; ++i) {
    const Monomial a = gen.coin() ? gen.monomial(-3, 6) : Monomial::zero();
    const int step = gen.uniform(1, 4);
    const int n = gen.uniform(0, 8);
    const QLaurent lhs = qrr::pochhammer_finite(a, step, n + 1, kOrder);
    const QLaurent rhs = qrr::mul_one_minus(qrr::pochhammer_finite(a, step, n, kOrder), a * Monomial(1, step * n));
    ASSERT_EQ(lhs, rhs);
  }
}

TEST(AlgebraProperties, SubstituteNegateIsInvolutiveHomomorphism) {
  qrr::testing::SeriesGen gen(5);
  for (int i = 0; i < kCases; ++i) {
    const QLaurent a = gen.any(kOrder), b = gen.any(kOrder);
    ASSERT_EQ(qrr::substitute_negate(a * b), qrr::substitute_negate(a) * qrr::substitute_negate(b));
    ASSERT_EQ(qrr::substitute_negate(qrr::substitute_negate(a)), a);
  }
}

}  // namespace
