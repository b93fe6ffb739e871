#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "optsample/rational.hpp"

namespace optsample {

// Bit budget of a sampler: k coin flips total, of which the last k-l form the
// repeating (suffix) part. l == k means purely dyadic (no repetition).
struct PrecisionSpec {
  uint32_t k = 1;
  uint32_t l = 1;
};

// Denominator of the number system with precision (k, l):
//   Z = 2^k - 2^l  when l < k,   Z = 2^k  when l == k.
// Requires 1 <= k, 0 <= l <= k.
mpz_class z_kl(const PrecisionSpec& spec);

// Binary expansion 0.prefix(suffix)* with |prefix| = l, |suffix| = k - l,
// most significant bit first. Encodings produced here are concise: the suffix
// is never all ones.
struct BinaryExpansion {
  std::vector<uint8_t> prefix;
  std::vector<uint8_t> suffix;
};

// Expansion of M / Z_kl. Range: 0 <= M < 2^k for l == k, 0 <= M < Z_kl for
// l < k (M == Z_kl needs an l+1-bit prefix and is rejected; degenerate
// distributions are handled before the number system is consulted).
BinaryExpansion encode_numsys(const mpz_class& m, const PrecisionSpec& spec);

// Value of an expansion; accepts the non-concise all-ones pattern (value 1),
// so decoding ranges over every (prefix, suffix) pair.
Rational decode_numsys(const BinaryExpansion& e, const PrecisionSpec& spec);

// Thrown when factoring inside multiplicative_order exceeds the trial-division
// budget; carries what was factored so far.
struct OrderBudgetError : std::runtime_error {
  OrderBudgetError(const std::string& what, mpz_class unfactored_in)
      : std::runtime_error(what), unfactored(std::move(unfactored_in)) {}
  mpz_class unfactored;
};

// Prime factorization by trial division up to `budget`; a remaining cofactor
// that passes a strong probable-prime test is accepted as prime, anything else
// raises OrderBudgetError.
std::vector<std::pair<mpz_class, unsigned long>> factorize(const mpz_class& n, uint64_t budget);

// Smallest e >= 1 with base^e == 1 (mod modulus). Requires modulus >= 2 and
// gcd(base, modulus) == 1. Works prime power by prime power (CRT), lifting the
// order mod p to p^e, so smooth moduli with huge exponents (e.g. 5^150) are
// cheap; the budget only limits trial-division factoring of the modulus and of
// each p - 1.
mpz_class multiplicative_order(const mpz_class& base, const mpz_class& modulus, uint64_t budget = 1000000);

// Minimal precision that represents a rational distribution exactly. k can be
// astronomically large (a prime power in the denominator forces
// ord(2 mod p^e) bits), hence arbitrary-precision fields.
struct ExactPrecision {
  mpz_class k;
  mpz_class l;
};

// Smallest k (with its l) such that every p_i lies in the (k, l) number
// system: d = lcm(denominators) = 2^t * d' with d' odd; dyadic targets get
// (max(t,1), k), others (t + ord(2 mod d'), t). Zero entries are ignored; a
// degenerate target (some p_i = 1) is a domain error.
ExactPrecision minimal_exact_precision(const std::vector<Rational>& p, uint64_t order_budget = 1000000);

}  // namespace optsample
