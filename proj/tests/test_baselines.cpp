#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "helpers.hpp"
#include "optsample/baselines.hpp"
#include "optsample/divergence.hpp"
#include "optsample/optimize.hpp"
#include "optsample/runtime.hpp"

using namespace optsample;

TEST_CASE("rejection_bit_width") {
  CHECK(rejection_bit_width(1) == 0);
  CHECK(rejection_bit_width(2) == 1);
  CHECK(rejection_bit_width(3) == 2);
  CHECK(rejection_bit_width(4) == 2);
  CHECK(rejection_bit_width(5) == 3);
  CHECK(rejection_bit_width(8) == 3);
  CHECK(rejection_bit_width(9) == 4);
  CHECK(rejection_bit_width(mpz_class(1) << 20) == 20);
  CHECK(rejection_bit_width((mpz_class(1) << 20) + 1) == 21);
  CHECK_THROWS_AS(rejection_bit_width(0), std::domain_error);
}

TEST_CASE("rejection_sample buckets and retries") {
  Assignment a{{3, 7}, 10};  // 4-bit words, accept w < 10
  {
    FixedBitsSource s({0, 0, 1, 0});  // w = 2 -> first bucket
    CHECK(rejection_sample(a, s) == 0);
    CHECK(s.bits_consumed() == 4);
  }
  {
    FixedBitsSource s({1, 0, 0, 1});  // w = 9 -> second bucket
    CHECK(rejection_sample(a, s) == 1);
  }
  {
    // w = 12 rejected, then w = 2 accepted: 8 bits total.
    FixedBitsSource s({1, 1, 0, 0, 0, 0, 1, 0});
    CHECK(rejection_sample(a, s) == 0);
    CHECK(s.bits_consumed() == 8);
  }
  {
    FixedBitsSource s(std::vector<uint8_t>{1, 1});  // runs dry mid-word
    CHECK_FALSE(rejection_sample(a, s).has_value());
  }
  {
    // Z = 1: zero bits, immediate answer.
    Assignment point{{1}, 1};
    FixedBitsSource s(std::vector<uint8_t>{});
    CHECK(rejection_sample(point, s) == 0);
    CHECK(s.bits_consumed() == 0);
  }
  {
    // Uniform over 3 with 2-bit words: W = 3 rejected, W = 1 -> outcome 1.
    Assignment u3{{1, 1, 1}, 3};
    FixedBitsSource s({1, 1, 0, 1});
    CHECK(rejection_sample(u3, s) == 1);
    CHECK(s.bits_consumed() == 4);
  }
  {
    FixedBitsSource s({0, 0, 0, 0});
    CHECK_THROWS_AS(rejection_sample({{3, 6}, 10}, s), std::domain_error);  // sum != Z
  }
}

TEST_CASE("rejection_expected_bits") {
  CHECK(rejection_expected_bits(10, 4) == Rational(32, 5));  // 4 * 16 / 10
  CHECK(rejection_expected_bits(5, 3) == Rational(24, 5));
  CHECK(rejection_expected_bits(4, 2) == Rational(2));  // power of two: no waste
  CHECK(rejection_expected_bits(1, 0) == Rational(0));
  CHECK_THROWS_AS(rejection_expected_bits(5, 2), std::domain_error);  // Z > 2^k
  CHECK_THROWS_AS(rejection_expected_bits(5, 4), std::domain_error);  // k not minimal
  CHECK_THROWS_AS(rejection_expected_bits(0, 1), std::domain_error);
}

TEST_CASE("inversion sampler goldens") {
  std::vector<Rational> half = {Rational(1, 2), Rational(1, 2)};
  // Strict comparison: u = 0 falls in the first bucket, u = 1/2 in the second.
  {
    FixedBitsSource s({0});
    CHECK(inversion_sample(half, 1, s) == 0);
    FixedBitsSource t({1});
    CHECK(inversion_sample(half, 1, t) == 1);
  }
  // <= comparison: both words land on the first outcome.
  {
    FixedBitsSource s({0});
    CHECK(inversion_sample(half, 1, s, true) == 0);
    FixedBitsSource t({1});
    CHECK(inversion_sample(half, 1, t, true) == 0);
  }
  {
    FixedBitsSource s({1});
    CHECK_FALSE(inversion_sample(half, 2, s).has_value());  // needs 2 bits
  }
}

TEST_CASE("inversion output distribution closed forms") {
  std::vector<Rational> half = {Rational(1, 2), Rational(1, 2)};
  CHECK(inversion_output_distribution(half, 1) ==
        std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK(inversion_output_distribution(half, 1, true) ==
        std::vector<Rational>{Rational(1), Rational(0)});

  // (3/10, 7/10) at k = 2 collapses to (1/2, 1/2) under both variants: the
  // words 00,01 -> outcome 0 boundary sits at ceil(4 * 3/10) = 2.
  std::vector<Rational> p = {Rational(3, 10), Rational(7, 10)};
  CHECK(inversion_output_distribution(p, 2) ==
        std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK(inversion_output_distribution(p, 2, true) ==
        std::vector<Rational>{Rational(1, 2), Rational(1, 2)});

  // Exactly representable cumulative sums reproduce the target (strict).
  std::vector<Rational> dyadic = {Rational(1, 4), Rational(1, 4), Rational(1, 2)};
  CHECK(inversion_output_distribution(dyadic, 2) == dyadic);

  // Uniform over 3 at k = 2: the spare word inflates the first outcome.
  std::vector<Rational> u3 = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  CHECK(inversion_output_distribution(u3, 2) ==
        std::vector<Rational>{Rational(1, 2), Rational(1, 4), Rational(1, 4)});

  // Expected bits of rejection at Z = 2^k stay k whatever the entropy is.
  CHECK(rejection_expected_bits(mpz_class(1) << 16, 16) == Rational(16));
}

TEST_CASE("closed form equals exhaustive enumeration of the sampler") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    size_t n = 2 + rng() % 5;
    auto p = testutil::random_distribution(rng, n);
    uint32_t k = (trial % 2 == 0) ? 4 : 8;
    for (bool le : {false, true}) {
      auto closed = inversion_output_distribution(p, k, le);
      auto rep = enumerate_outcomes(
          [&](BitSource& src) { return inversion_sample(p, k, src, le); }, n, k);
      REQUIRE(rep.unresolved_mass == Rational(0));
      for (size_t i = 0; i < n; ++i) CHECK(rep.masses[i] == closed[i]);
      // Inversion always consumes exactly k bits.
      CHECK(rep.expected_bits_truncated == Rational(k));
    }
  }
}

TEST_CASE("optimal approximation dominates inversion at equal bit budget") {
  auto tv = DivergenceKind::parse("tv");
  auto ctx = EvalContext::exact();
  std::vector<Rational> p = {Rational(3, 10), Rational(7, 10)};

  auto res = closest_approx(p, 2, tv, ctx, ApproxClass::kBoundedDyadic);
  REQUIRE(res.error.is_exact());
  CHECK(res.error.exact_value() == Rational(1, 20));

  auto inv = inversion_output_distribution(p, 2);
  Rational tv_inv;
  for (size_t i = 0; i < p.size(); ++i) tv_inv += (inv[i] - p[i]).abs();
  tv_inv = tv_inv / Rational(2);
  CHECK(tv_inv == Rational(1, 5));
  CHECK(res.error.exact_value() < tv_inv);

  // Random spot checks: the sweep optimum never loses to either variant.
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    size_t n = 2 + rng() % 4;
    auto q = testutil::random_distribution(rng, n);
    uint32_t k = 3 + rng() % 4;
    auto best = closest_approx(q, k, tv, ctx);
    for (bool le : {false, true}) {
      auto out = inversion_output_distribution(q, k, le);
      Rational err;
      for (size_t i = 0; i < n; ++i) err += (out[i] - q[i]).abs();
      err = err / Rational(2);
      CHECK(best.error.exact_value() <= err);
    }
  }
}
