#include "optsample/numsys.hpp"

#include <stdexcept>

namespace optsample {

namespace {

constexpr uint32_t kMaxBits = 65536;

void validate_spec(const PrecisionSpec& spec) {
  if (spec.k < 1) throw std::domain_error("precision: k must be >= 1");
  if (spec.l > spec.k) throw std::domain_error("precision: l must be <= k");
  if (spec.k > kMaxBits) throw std::domain_error("precision: k too large for materialized number system");
}

std::vector<uint8_t> to_bits_msb_first(const mpz_class& v, uint32_t width) {
  std::vector<uint8_t> bits(width, 0);
  for (uint32_t j = 0; j < width; ++j) {
    bits[width - 1 - j] = static_cast<uint8_t>(mpz_tstbit(v.get_mpz_t(), j));
  }
  return bits;
}

mpz_class from_bits_msb_first(const std::vector<uint8_t>& bits) {
  mpz_class v = 0;
  for (uint8_t b : bits) {
    if (b > 1) throw std::domain_error("binary expansion: digit outside {0,1}");
    v = v * 2 + b;
  }
  return v;
}

}  // namespace

mpz_class z_kl(const PrecisionSpec& spec) {
  validate_spec(spec);
  if (spec.l == spec.k) return pow2(spec.k);
  return pow2(spec.k) - pow2(spec.l);
}

BinaryExpansion encode_numsys(const mpz_class& m, const PrecisionSpec& spec) {
  mpz_class z = z_kl(spec);
  if (m < 0) throw std::domain_error("encode: M must be nonnegative");
  BinaryExpansion e;
  if (spec.l == spec.k) {
    if (m >= z) throw std::domain_error("encode: M out of range for dyadic (k, k) system");
    e.prefix = to_bits_msb_first(m, spec.k);
    return e;
  }
  if (m >= z) throw std::domain_error("encode: M out of range for (k, l) system");
  mpz_class period = pow2(spec.k - spec.l) - 1;
  mpz_class x, y;
  mpz_fdiv_qr(x.get_mpz_t(), y.get_mpz_t(), m.get_mpz_t(), period.get_mpz_t());
  e.prefix = to_bits_msb_first(x, spec.l);
  e.suffix = to_bits_msb_first(y, spec.k - spec.l);
  return e;
}

Rational decode_numsys(const BinaryExpansion& e, const PrecisionSpec& spec) {
  validate_spec(spec);
  if (e.prefix.size() != spec.l || e.suffix.size() != spec.k - spec.l) {
    throw std::domain_error("decode: expansion lengths do not match the precision spec");
  }
  mpz_class x = from_bits_msb_first(e.prefix);
  if (spec.l == spec.k) return Rational(x, pow2(spec.k));
  mpz_class y = from_bits_msb_first(e.suffix);
  mpz_class period = pow2(spec.k - spec.l) - 1;
  return Rational(period * x + y, z_kl(spec));
}

std::vector<std::pair<mpz_class, unsigned long>> factorize(const mpz_class& n, uint64_t budget) {
  if (n < 1) throw std::domain_error("factorize: n must be >= 1");
  std::vector<std::pair<mpz_class, unsigned long>> factors;
  mpz_class rest = n;
  auto strip = [&](const mpz_class& p) {
    unsigned long e = 0;
    while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
      rest /= p;
      ++e;
    }
    if (e > 0) factors.emplace_back(p, e);
  };
  strip(2);
  strip(3);
  mpz_class d = 5;
  // Wheel over 6k +/- 1; stop once d exceeds the budget or sqrt(rest).
  int step = 2;
  while (rest > 1 && d <= budget && d * d <= rest) {
    strip(d);
    d += step;
    step = 6 - step;
  }
  if (rest > 1) {
    if (rest <= mpz_class(budget) * mpz_class(budget) ||
        mpz_probab_prime_p(rest.get_mpz_t(), 40) != 0) {
      factors.emplace_back(rest, 1);
    } else {
      throw OrderBudgetError(
          "factorize: composite cofactor " + rest.get_str() +
              " exceeds the trial-division budget " + std::to_string(budget),
          rest);
    }
  }
  return factors;
}

namespace {

mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

// Order of base modulo an odd prime p: start from p-1 and strip prime factors
// while the power stays 1.
mpz_class order_mod_prime(const mpz_class& base, const mpz_class& p, uint64_t budget) {
  mpz_class e = p - 1;
  for (const auto& [q, mult] : factorize(p - 1, budget)) {
    for (unsigned long i = 0; i < mult; ++i) {
      mpz_class reduced = e / q;
      if (powm(base, reduced, p) == 1) {
        e = reduced;
      } else {
        break;
      }
    }
  }
  return e;
}

// Order of base modulo p^e for odd prime p: the order mod p, times p^(e - f)
// where p^f is the largest power of p with base^(ord mod p) == 1 (mod p^f).
mpz_class order_mod_odd_prime_power(const mpz_class& base, const mpz_class& p, unsigned long e,
                                    uint64_t budget) {
  mpz_class o = order_mod_prime(base, p, budget);
  if (e == 1) return o;
  mpz_class pe;
  mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
  mpz_class b = powm(base, o, pe);
  if (b == 1) return o;
  mpz_class diff = b - 1;
  unsigned long f = 0;
  while (mpz_divisible_p(diff.get_mpz_t(), p.get_mpz_t())) {
    diff /= p;
    ++f;
  }
  // base == 1 (mod p) guarantees f >= 1; the order gains a factor p^(e - f).
  mpz_class lift;
  mpz_pow_ui(lift.get_mpz_t(), p.get_mpz_t(), e - f);
  return o * lift;
}

// The unit group mod 2^e is not cyclic for e >= 3; every order is a power of
// two, found by repeated squaring.
mpz_class order_mod_power_of_two(const mpz_class& base, unsigned long e) {
  if (e == 1) return 1;
  mpz_class mod = pow2(e);
  mpz_class cur = base % mod;
  if (cur < 0) cur += mod;
  mpz_class o = 1;
  while (cur != 1) {
    cur = (cur * cur) % mod;
    o *= 2;
  }
  return o;
}

}  // namespace

mpz_class multiplicative_order(const mpz_class& base, const mpz_class& modulus, uint64_t budget) {
  if (modulus < 2) throw std::domain_error("multiplicative_order: modulus must be >= 2");
  if (gcd(base, modulus) != 1) {
    throw std::domain_error("multiplicative_order: base and modulus must be coprime");
  }
  mpz_class result = 1;
  for (const auto& [p, e] : factorize(modulus, budget)) {
    mpz_class o = (p == 2) ? order_mod_power_of_two(base, e)
                           : order_mod_odd_prime_power(base, p, e, budget);
    result = lcm(result, o);
  }
  // Cheap self-check: the computed order must actually annihilate the base.
  if (powm(base, result, modulus) != 1) {
    throw std::logic_error("multiplicative_order: internal verification failed");
  }
  return result;
}

ExactPrecision minimal_exact_precision(const std::vector<Rational>& p, uint64_t order_budget) {
  check_distribution(p);
  mpz_class d = 1;
  for (const auto& e : p) {
    if (e.is_zero()) continue;
    if (e == Rational(1)) {
      throw std::domain_error("minimal_exact_precision: degenerate distribution (an entry equals 1)");
    }
    d = lcm(d, e.den());
  }
  unsigned long t = mpz_scan1(d.get_mpz_t(), 0);  // 2-adic valuation of d
  mpz_class odd = d >> t;
  ExactPrecision out;
  if (odd == 1) {
    out.k = t < 1 ? 1 : t;
    out.l = out.k;
    return out;
  }
  mpz_class ord = multiplicative_order(2, odd, order_budget);
  out.k = mpz_class(t) + ord;
  out.l = t;
  // Collapse the redundant (k, k-1) system to its dyadic equivalent. Not
  // reachable from the formulas above (it would need ord = 1), kept as a
  // guard for future callers constructing precisions directly.
  if (out.l == out.k - 1) {
    out.k = out.k - 1;
    out.l = out.k;
  }
  return out;
}

}  // namespace optsample
