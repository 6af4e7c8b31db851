#include <gtest/gtest.h>

#include "qrr/oracles.hpp"

namespace {

using namespace qrr::oracles;

IntSeries ints(std::vector<std::int64_t> v) { return v; }

TEST(CountPartitions, RogersRamanujanClass) {
  EXPECT_EQ(count_partitions(PartitionClass::residues(5, {1, 4}), 6), ints({1, 1, 1, 1, 2, 2, 3}));
}

TEST(CountPartitions, DistinctParts) {
  EXPECT_EQ(count_partitions(PartitionClass::distinct_parts(), 5), ints({1, 1, 1, 2, 2, 3}));
}

TEST(CountPartitions, EmptyClass) {
  EXPECT_EQ(count_partitions(PartitionClass::empty(), 0), ints({1}));
  EXPECT_EQ(count_partitions(PartitionClass::empty(), 4), ints({1, 0, 0, 0, 0}));
}

TEST(CountPartitions, UnrestrictedMatchesKnownValues) {
  // p(0..12)
  EXPECT_EQ(count_partitions(PartitionClass::all_parts(), 12), ints({1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77}));
}

TEST(CountPartitions, BadClassRejected) {
  EXPECT_THROW(count_partitions(PartitionClass::residues(5, {5}), 3), qrr::Error);
  EXPECT_THROW(count_partitions(PartitionClass::residues(0, {}), 3), qrr::Error);
}

TEST(ExpandProduct, Pentagonal) {
  std::vector<Progression> f{{-1, 1, 1, 12, 1}};
  IntSeries want(13, 0);
  // Euler's pentagonal numbers 0, 1, 2, 5, 7, 12 with signs + - - + + -
  for (int e : {0, 5, 7}) want[e] = 1;
  for (int e : {1, 2, 12}) want[e] = -1;
  EXPECT_EQ(expand_product_bruteforce(f, 12), want);
}

TEST(ExpandProduct, SingleFactor) {
  EXPECT_EQ(expand_product_bruteforce({{+1, 1, 1, 1, 1}}, 1), ints({1, 1}));
  EXPECT_EQ(expand_product_bruteforce({{+1, 1, 1, 1, 1}}, 3), ints({1, 1, 0, 0}));
}

TEST(ExpandProduct, BadProgressionRejected) {
  EXPECT_THROW(expand_product_bruteforce({{-1, 1, 0, std::nullopt, 1}}, 5), qrr::Error);
}

// Every class the catalog relies on, each with the product whose inverse it
// counts. Counting by knapsack and dividing by the literal product must agree.
struct ClassCase {
  PartitionClass pc;
  std::vector<Progression> product;  // prod (1 + sign q^e)^(power) over the class
};

std::vector<ClassCase> catalog_classes() {
  return {
      {PartitionClass::residues(5, {1, 4}), {{-1, 1, 5, std::nullopt, 1}, {-1, 4, 5, std::nullopt, 1}}},
      {PartitionClass::residues(5, {2, 3}), {{-1, 2, 5, std::nullopt, 1}, {-1, 3, 5, std::nullopt, 1}}},
      {PartitionClass::all_parts(), {{-1, 1, 1, std::nullopt, 1}}},
      {PartitionClass::residues(2, {1}), {{-1, 1, 2, std::nullopt, 1}}},
      {PartitionClass::residues(4, {2}), {{-1, 2, 4, std::nullopt, 1}}},
      {PartitionClass::residues(8, {1, 4, 7}), {{-1, 1, 8, std::nullopt, 1}, {-1, 4, 8, std::nullopt, 1}, {-1, 7, 8, std::nullopt, 1}}},
      {PartitionClass::residues(8, {3, 4, 5}), {{-1, 3, 8, std::nullopt, 1}, {-1, 4, 8, std::nullopt, 1}, {-1, 5, 8, std::nullopt, 1}}},
      {PartitionClass::residues(6, {1, 5}), {{-1, 1, 6, std::nullopt, 1}, {-1, 5, 6, std::nullopt, 1}}},
  };
}

TEST(OracleConsistency, KnapsackMatchesInverseProduct) {
  constexpr int N = 100;
  for (const auto& c : catalog_classes()) {
    const IntSeries counted = count_partitions(c.pc, N);
    const IntSeries inverse = divide(unit_series(N), expand_product_bruteforce(c.product, N));
    EXPECT_EQ(counted, inverse) << "modulus " << c.pc.modulus;
    // Negative power divides directly; it must agree too.
    std::vector<Progression> inv = c.product;
    for (auto& p : inv) p.power = -p.power;
    EXPECT_EQ(counted, expand_product_bruteforce(inv, N));
  }
}

TEST(OracleConsistency, DistinctOddPartsMatchProduct) {
  constexpr int N = 100;
  PartitionClass odd_distinct = PartitionClass::residues(2, {1});
  odd_distinct.distinct = true;
  EXPECT_EQ(count_partitions(odd_distinct, N), expand_product_bruteforce({{+1, 1, 2, std::nullopt, 1}}, N));
}

TEST(OracleConsistency, CountsAreNonnegative) {
  for (const auto& c : catalog_classes()) {
    for (auto v : count_partitions(c.pc, 80)) EXPECT_GE(v, 0);
  }
  PartitionClass distinct = PartitionClass::distinct_parts();
  distinct.parity = ParityFilter::even_only;
  for (auto v : count_partitions(distinct, 80)) EXPECT_GE(v, 0);
}

TEST(OracleConsistency, ParityFilter) {
  PartitionClass even = PartitionClass::all_parts();
  even.parity = ParityFilter::even_only;
  EXPECT_EQ(count_partitions(even, 6), ints({1, 0, 1, 0, 2, 0, 3}));
}

TEST(Arithmetic, DivideAndMultiplyInvert) {
  constexpr int N = 30;
  const IntSeries a = count_partitions(PartitionClass::residues(5, {1, 4}), N);
  const IntSeries b = expand_product_bruteforce({{-1, 1, 3, std::nullopt, 1}}, N);
  EXPECT_EQ(divide(multiply(a, b), b), a);
  EXPECT_THROW(divide(a, IntSeries(N + 1, 0)), qrr::Error);
}

TEST(Arithmetic, OverflowIsCaught) {
  // p(300) fits in int64; its square does not.
  const IntSeries p = count_partitions(PartitionClass::all_parts(), 300);
  EXPECT_THROW(multiply(p, p), qrr::Error);
  EXPECT_THROW(count_partitions(PartitionClass::all_parts(), 450), qrr::Error);
}

// (q^3;q^6)^2 (q^6;q^6) / (q)_inf
IntSeries e18_product(int order) {
  return expand_product_bruteforce(
      {{-1, 3, 6, std::nullopt, 2}, {-1, 6, 6, std::nullopt, 1}, {-1, 1, 1, std::nullopt, -1}}, order);
}

TEST(DoubleSum, E18LeftEqualsProduct) {
  // sum q^(2m^2+2mr+r^2) / ((q^2;q^2)_m (q)_r)
  DoubleSum ds{{2, 2, 1, 0, 0}, {1, 2, 2}, {1, 1, 1}, std::nullopt, std::nullopt};
  EXPECT_EQ(double_sum_eval(ds, 6), e18_product(6));
  EXPECT_EQ(double_sum_eval(ds, 80), e18_product(80));
}

TEST(DoubleSum, E18ProductViaPartitionDenominator) {
  constexpr int N = 6;
  const IntSeries num = expand_product_bruteforce({{-1, 3, 6, std::nullopt, 2}, {-1, 6, 6, std::nullopt, 1}}, N);
  const IntSeries viaCount = multiply(num, count_partitions(PartitionClass::all_parts(), N));
  EXPECT_EQ(viaCount, e18_product(N));
}

TEST(DoubleSum, OnlyOriginContributes) {
  DoubleSum ds{{5, 0, 5, 1, 1}, {1, 1, 1}, {1, 1, 1}, std::nullopt, std::nullopt};
  EXPECT_EQ(double_sum_eval(ds, 1), ints({1, 0}));
  EXPECT_EQ(double_sum_eval(ds, 0), ints({1}));
}

TEST(DoubleSum, E17AndWeightedForms) {
  constexpr int N = 80;
  // sum q^(4m^2+4mr+2r^2-r) / ((q^4;q^4)_m (q^2;q^2)_r) = prod (1 + q^(2n-1))
  DoubleSum e17{{4, 4, 2, 0, -1}, {1, 4, 4}, {1, 2, 2}, std::nullopt, std::nullopt};
  EXPECT_EQ(double_sum_eval(e17, N), expand_product_bruteforce({{+1, 1, 2, std::nullopt, 1}}, N));
  // t = q: weight q^(2m+r) gives prod (1 + q^(2n))
  DoubleSum gg = e17;
  gg.weight = Weight{1, 1, 2, 1};
  EXPECT_EQ(double_sum_eval(gg, N), expand_product_bruteforce({{+1, 2, 2, std::nullopt, 1}}, N));
  // t = q^2 gives prod (1 + q^(2n+1))
  gg.weight = Weight{1, 2, 2, 1};
  EXPECT_EQ(double_sum_eval(gg, N), expand_product_bruteforce({{+1, 3, 2, std::nullopt, 1}}, N));
}

TEST(DoubleSum, NumeratorPochhammer) {
  // sum_n q^(n^2+n) (-1;q^2)_n / ((q^2;q^2)_n) as a degenerate double sum with r pinned by a
  // huge r-coefficient: only r = 0 contributes.
  constexpr int N = 20;
  DoubleSum ds{{1, 0, 1000, 1, 0}, {1, 2, 2}, {1, 1, 1}, std::make_pair(FinitePoch{-1, 0, 2}, Index::m), std::nullopt};
  IntSeries want(N + 1, 0);
  // direct: term_n = q^(n^2+n) prod_{j<n} (1 + q^(2j)) / prod_{j=1..n} (1 - q^(2j))
  for (int n = 0; n * n + n <= N; ++n) {
    IntSeries t(N + 1, 0);
    t[n * n + n] = 1;
    for (int j = 0; j < n; ++j) {
      IntSeries f(N + 1, 0);
      f[0] = 1;
      if (2 * j <= N) f[2 * j] += 1;
      t = multiply(t, f);
    }
    for (int j = 1; j <= n; ++j) t = divide(t, expand_product_bruteforce({{-1, 2 * j, 1, 1, 1}}, N));
    for (int k = 0; k <= N; ++k) want[k] += t[k];
  }
  EXPECT_EQ(double_sum_eval(ds, N), want);
}

TEST(DoubleSum, DivergenceDetected) {
  // Exponent m - r never grows in r.
  DoubleSum ds{{0, 0, 0, 1, -1}, {1, 1, 1}, {1, 1, 1}, std::nullopt, std::nullopt};
  EXPECT_THROW(double_sum_eval(ds, 5), qrr::DivergentSum);
}

}  // namespace
