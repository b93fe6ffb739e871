#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "optsample/numsys.hpp"
#include "optsample/rational.hpp"

using namespace optsample;

namespace {

mpz_class pow_mpz(unsigned long base, unsigned long exp) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

Rational geometric_value(const BinaryExpansion& e, const PrecisionSpec& spec) {
  // Independent oracle: prefix/2^l + (suffix value)/(2^l * (2^{k-l} - 1)).
  Rational prefix_val;
  Rational half(1, 2);
  Rational scale(1);
  for (uint8_t b : e.prefix) {
    scale = scale * half;
    if (b) prefix_val += scale;
  }
  if (spec.l == spec.k) return prefix_val;
  mpz_class suffix_int = 0;
  for (uint8_t b : e.suffix) suffix_int = suffix_int * 2 + int(b);
  mpz_class period = pow2(spec.k - spec.l) - 1;
  return prefix_val + Rational(suffix_int, period) * Rational(1, pow2(spec.l));
}

}  // namespace

TEST_CASE("z_kl goldens and errors") {
  CHECK(z_kl({1, 0}) == 1);
  CHECK(z_kl({1, 1}) == 2);
  CHECK(z_kl({2, 0}) == 3);
  CHECK(z_kl({2, 1}) == 2);
  CHECK(z_kl({2, 2}) == 4);
  CHECK(z_kl({5, 1}) == 30);
  CHECK(z_kl({5, 5}) == 32);
  CHECK(z_kl({64, 29}) == mpz_class("18446744073172680704"));
  CHECK_THROWS_AS(z_kl({0, 0}), std::domain_error);
  CHECK_THROWS_AS(z_kl({3, 4}), std::domain_error);
}

TEST_CASE("encode_numsys goldens") {
  // 3/10 in the (5,1) system: Z = 30, M = 9. 9/30 = 0.0(1001)*.
  auto e = encode_numsys(9, {5, 1});
  CHECK(e.prefix == std::vector<uint8_t>{0});
  CHECK(e.suffix == std::vector<uint8_t>{1, 0, 0, 1});
  // 21/30 = 0.1(0110)*.
  e = encode_numsys(21, {5, 1});
  CHECK(e.prefix == std::vector<uint8_t>{1});
  CHECK(e.suffix == std::vector<uint8_t>{0, 1, 1, 0});
  // Dyadic: 5/32 = 0.00101.
  e = encode_numsys(5, {5, 5});
  CHECK(e.prefix == std::vector<uint8_t>{0, 0, 1, 0, 1});
  CHECK(e.suffix.empty());
  // Zero mass: all-zero expansion.
  e = encode_numsys(0, {5, 1});
  CHECK(e.prefix == std::vector<uint8_t>{0});
  CHECK(e.suffix == std::vector<uint8_t>{0, 0, 0, 0});
  // Pure suffix system (l = 0): 1/3 = (01)*.
  e = encode_numsys(1, {2, 0});
  CHECK(e.prefix.empty());
  CHECK(e.suffix == std::vector<uint8_t>{0, 1});
}

TEST_CASE("encode_numsys range errors") {
  CHECK_THROWS_AS(encode_numsys(30, {5, 1}), std::domain_error);  // M == Z
  CHECK_THROWS_AS(encode_numsys(31, {5, 1}), std::domain_error);
  CHECK_THROWS_AS(encode_numsys(32, {5, 5}), std::domain_error);  // M == 2^k
  CHECK_THROWS_AS(encode_numsys(-1, {5, 1}), std::domain_error);
}

TEST_CASE("decode accepts the non-concise all-ones pattern as 1") {
  BinaryExpansion ones;
  ones.prefix = {1, 1};
  ones.suffix = {1, 1, 1};
  CHECK(decode_numsys(ones, {5, 2}) == Rational(1));
  // Mixed case: 0.01(111)* = 1/4 + 7/(4 * 7) = 1/2.
  BinaryExpansion mixed;
  mixed.prefix = {0, 1};
  mixed.suffix = {1, 1, 1};
  CHECK(decode_numsys(mixed, {5, 2}) == Rational(1, 2));
}

TEST_CASE("encode/decode round-trip, conciseness, and geometric oracle") {
  std::vector<PrecisionSpec> specs = {{1, 0}, {2, 0}, {2, 1}, {3, 1}, {5, 1},
                                      {5, 5}, {6, 3}, {8, 0}, {9, 9}, {12, 7}};
  for (const auto& spec : specs) {
    mpz_class z = z_kl(spec);
    for (mpz_class m = 0; m < z; ++m) {
      auto e = encode_numsys(m, spec);
      REQUIRE(e.prefix.size() == spec.l);
      REQUIRE(e.suffix.size() == spec.k - spec.l);
      if (spec.l < spec.k) {
        bool all_ones = true;
        for (uint8_t b : e.suffix) all_ones = all_ones && b == 1;
        CHECK_FALSE(all_ones);  // concise form
      }
      Rational want(m, z);
      CHECK(decode_numsys(e, spec) == want);
      CHECK(geometric_value(e, spec) == want);
    }
  }
}

TEST_CASE("factorize") {
  auto f = factorize(360, 1000);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == std::pair<mpz_class, unsigned long>(2, 3));
  CHECK(f[1] == std::pair<mpz_class, unsigned long>(3, 2));
  CHECK(f[2] == std::pair<mpz_class, unsigned long>(5, 1));

  f = factorize(1, 1000);
  CHECK(f.empty());

  // Large prime cofactor is accepted via a probable-prime test.
  f = factorize(mpz_class(2) * 1000003, 100);
  REQUIRE(f.size() == 2);
  CHECK(f[1].first == 1000003);

  // Composite cofactor beyond the budget raises, carrying the cofactor.
  try {
    factorize(10403, 50);  // 101 * 103
    FAIL("expected OrderBudgetError");
  } catch (const OrderBudgetError& err) {
    CHECK(err.unfactored == 10403);
  }
}

TEST_CASE("multiplicative_order goldens") {
  CHECK(multiplicative_order(2, 3) == 2);
  CHECK(multiplicative_order(2, 5) == 4);
  CHECK(multiplicative_order(2, 7) == 3);
  CHECK(multiplicative_order(2, 9) == 6);
  CHECK(multiplicative_order(2, 15) == 4);
  CHECK(multiplicative_order(2, 101) == 100);
  CHECK(multiplicative_order(2, 103) == 51);
  CHECK(multiplicative_order(2, 10403) == 5100);  // lcm(100, 51)
  CHECK(multiplicative_order(3, 8) == 2);
  // Prime-power lifting keeps huge smooth moduli cheap: ord(2 mod 5^150).
  mpz_class want = 4 * pow_mpz(5, 149);
  CHECK(multiplicative_order(2, pow_mpz(5, 150)) == want);
}

TEST_CASE("multiplicative_order errors") {
  CHECK_THROWS_AS(multiplicative_order(2, 1), std::domain_error);
  CHECK_THROWS_AS(multiplicative_order(2, 4), std::domain_error);  // gcd != 1
  CHECK_THROWS_AS(multiplicative_order(2, 10403, 50), OrderBudgetError);
}

TEST_CASE("multiplicative_order brute-force cross-check") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    unsigned long modulus = 3 + rng() % 400;
    unsigned long base = 2 + rng() % 50;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), mpz_class(base).get_mpz_t(), mpz_class(modulus).get_mpz_t());
    if (g != 1) continue;
    unsigned long expect = 0;
    mpz_class acc = 1;
    for (unsigned long e = 1; e <= modulus; ++e) {
      acc = (acc * base) % modulus;
      if (acc == 1) {
        expect = e;
        break;
      }
    }
    REQUIRE(expect > 0);
    CHECK(multiplicative_order(base, modulus) == expect);
  }
}

TEST_CASE("minimal_exact_precision pins") {
  // (3/10, 7/10): d = 10 = 2 * 5, ord(2 mod 5) = 4 -> k = 5, l = 1.
  auto p = minimal_exact_precision({Rational(3, 10), Rational(7, 10)});
  CHECK(p.k == 5);
  CHECK(p.l == 1);

  // Dyadic: l == k.
  p = minimal_exact_precision({Rational(1, 2), Rational(1, 4), Rational(1, 4)});
  CHECK(p.k == 2);
  CHECK(p.l == 2);
  p = minimal_exact_precision({Rational(1, 8), Rational(7, 8)});
  CHECK(p.k == 3);
  CHECK(p.l == 3);

  // Uniform over 3: purely repeating, l = 0.
  p = minimal_exact_precision({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  CHECK(p.k == 2);
  CHECK(p.l == 0);

  // Degenerate point mass is rejected even via minimal precision.
  CHECK_THROWS_AS(minimal_exact_precision({Rational(1), Rational(0)}), std::domain_error);

  // Zero entries are ignored when collecting denominators.
  p = minimal_exact_precision({Rational(0), Rational(3, 10), Rational(7, 10)});
  CHECK(p.k == 5);
  CHECK(p.l == 1);

  // Odd prime denominator q: k = ord(2 mod q), l = 0.
  p = minimal_exact_precision({Rational(1, 101), Rational(100, 101)});
  CHECK(p.k == 100);
  CHECK(p.l == 0);

  // Huge smooth denominator: binomial(50, 61/500) needs k = 100 + 4 * 5^149.
  std::vector<Rational> binom;
  {
    Rational q(61, 500), r(439, 500);
    Rational coeff(1);
    Rational cur = Rational(1);
    for (int i = 0; i < 50; ++i) cur = cur * r;
    for (int i = 0; i <= 50; ++i) {
      binom.push_back(coeff * cur);
      if (i < 50) {
        coeff = coeff * Rational(50 - i) / Rational(i + 1);
        cur = cur / r * q;
      }
    }
    check_distribution(binom);
  }
  p = minimal_exact_precision(binom);
  CHECK(p.k == 100 + 4 * pow_mpz(5, 149));
  CHECK(p.l == 100);

  // Budget failure propagates.
  CHECK_THROWS_AS(minimal_exact_precision({Rational(1, 10403), Rational(10402, 10403)}, 50),
                  OrderBudgetError);
}

TEST_CASE("every Z <= 200 target embeds with k <= Z - 1") {
  // Any M/Z with Z >= 2 fits some system with k <= Z - 1: the order of 2
  // modulo the odd part divides a value below it. Spot-check the whole range.
  for (unsigned long z = 2; z <= 200; ++z) {
    std::vector<Rational> p = {Rational(1, mpz_class(z)), Rational(mpz_class(z) - 1, mpz_class(z))};
    auto prec = minimal_exact_precision(p);
    CHECK(prec.k <= z - 1);
    CHECK(prec.l <= prec.k);
    // Verify the claim: Z_kl is divisible by z, so M/Z embeds exactly.
    if (prec.k <= 64) {
      PrecisionSpec spec{uint32_t(prec.k.get_ui()), uint32_t(prec.l.get_ui())};
      mpz_class zz = z_kl(spec);
      CHECK(zz % z == 0);
    }
  }
}
