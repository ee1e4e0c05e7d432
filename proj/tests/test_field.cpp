#include <gtest/gtest.h>

#include <vector>

#include "heisvoa/field.hpp"

using namespace heisvoa;

namespace {

// C(m, n) mod p from Pascal's rule, reducing every entry.
std::vector<std::vector<std::uint32_t>> pascal_mod(std::uint32_t p, std::size_t rows) {
  std::vector<std::vector<std::uint32_t>> t(rows + 1, std::vector<std::uint32_t>(rows + 1, 0));
  for (std::size_t m = 0; m <= rows; ++m) {
    t[m][0] = 1 % p;
    for (std::size_t n = 1; n <= m; ++n) t[m][n] = (t[m - 1][n - 1] + t[m - 1][n]) % p;
  }
  return t;
}

// Exact C(m, k) for any integer m via the falling factorial, then reduced mod p.
std::uint32_t exact_binom_mod(std::int64_t m, std::uint64_t k, std::uint32_t p) {
  __int128 num = 1, den = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    num *= static_cast<__int128>(m - static_cast<std::int64_t>(i));
    den *= static_cast<__int128>(i + 1);
    const __int128 g = [](__int128 a, __int128 b) {
      if (a < 0) a = -a;
      while (b) {
        const __int128 r = a % b;
        a = b;
        b = r;
      }
      return a;
    }(num, den);
    num /= g;
    den /= g;
  }
  __int128 v = num / den;
  v %= p;
  if (v < 0) v += p;
  return static_cast<std::uint32_t>(v);
}

}  // namespace

TEST(Field, LucasMatchesPascalUpTo200) {
  for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
    const PrimeField F(p);
    const auto t = pascal_mod(p, 200);
    for (std::uint64_t m = 0; m <= 200; ++m)
      for (std::uint64_t n = 0; n <= 200; ++n) {
        const std::uint32_t expect = n <= m ? t[m][n] : 0;
        ASSERT_EQ(F.binom(m, n).value, expect) << "p=" << p << " m=" << m << " n=" << n;
      }
  }
}

TEST(Field, SignedTopMatchesExactIntegers) {
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u}) {
    const PrimeField F(p);
    for (std::int64_t m = -25; m <= 25; ++m)
      for (std::uint64_t k = 0; k <= 12; ++k)
        ASSERT_EQ(F.binom_signed_top(m, k).value, exact_binom_mod(m, k, p)) << "p=" << p << " m=" << m << " k=" << k;
  }
}

TEST(Field, SignedBinomWrapper) {
  EXPECT_EQ(signed_binom(1, 3, 5).value, 4u);  // C(-1, 3) = -1
  EXPECT_EQ(signed_binom(2, 2, 7).value, 3u);  // C(-2, 2) = 3
  EXPECT_THROW(signed_binom(0, 2, 5), std::invalid_argument);
}

TEST(Field, InverseByExhaustiveSearch) {
  for (std::uint32_t p : {2u, 3u, 13u, 101u}) {
    const PrimeField F(p);
    for (std::uint32_t a = 1; a < p; ++a) {
      std::uint32_t brute = 0;
      for (std::uint32_t b = 1; b < p; ++b)
        if ((static_cast<std::uint64_t>(a) * b) % p == 1) brute = b;
      EXPECT_EQ(F.inv(Fp(a)).value, brute);
    }
    EXPECT_THROW(F.inv(Fp(0)), std::domain_error);
  }
}

TEST(Field, ArithmeticAndConversion) {
  const PrimeField F(7);
  EXPECT_EQ(F(-1).value, 6u);
  EXPECT_EQ(F(15).value, 1u);
  EXPECT_EQ(F.add(Fp(5), Fp(4)).value, 2u);
  EXPECT_EQ(F.sub(Fp(2), Fp(5)).value, 4u);
  EXPECT_EQ(F.neg(Fp(0)).value, 0u);
  EXPECT_EQ(F.pow(Fp(3), 6).value, 1u);
  EXPECT_EQ(F.sign(3).value, 6u);
}

TEST(Field, RejectsComposite) {
  EXPECT_THROW(PrimeField(1), std::invalid_argument);
  EXPECT_THROW(PrimeField(4), std::invalid_argument);
  EXPECT_THROW(binom_mod_p(3, 1, 9), std::invalid_argument);
  EXPECT_NO_THROW(PrimeField(65537));
}

TEST(Field, LargePrimeWithoutTables) {
  const std::uint32_t p = 1000003;
  const PrimeField F(p);
  // C(10, 3) = 120 and C(p + 2, 2) = C(2, 2) * C(1, 0) by Lucas.
  EXPECT_EQ(F.binom(10, 3).value, 120u);
  EXPECT_EQ(F.binom(p + 2, 2).value, 1u);
}
