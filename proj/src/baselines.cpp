#include "optsample/baselines.hpp"

#include <stdexcept>

namespace optsample {

namespace {

// Exactly k bits, MSB first; nullopt when the source runs dry.
std::optional<mpz_class> draw_word(uint32_t k, BitSource& src) {
  mpz_class w = 0;
  for (uint32_t i = 0; i < k; ++i) {
    const std::optional<int> b = src.next_bit();
    if (!b.has_value()) return std::nullopt;
    w = 2 * w + *b;
  }
  return w;
}

}  // namespace

uint32_t rejection_bit_width(const mpz_class& z) {
  if (z < 1) throw std::domain_error("total must be positive");
  if (z == 1) return 0;
  const mpz_class top = z - 1;
  return static_cast<uint32_t>(mpz_sizeinbase(top.get_mpz_t(), 2));
}

std::optional<uint32_t> rejection_sample(const Assignment& a, BitSource& src) {
  if (a.m.empty()) throw std::domain_error("assignment has no outcomes");
  mpz_class sum = 0;
  for (const mpz_class& m : a.m) sum += m;
  if (sum != a.z || a.z < 1) {
    throw std::domain_error("assignment entries must sum to the positive total");
  }
  const uint32_t k = rejection_bit_width(a.z);
  for (;;) {
    const std::optional<mpz_class> w = draw_word(k, src);
    if (!w.has_value()) return std::nullopt;
    if (*w >= a.z) continue;
    mpz_class cum = 0;
    for (size_t i = 0; i < a.m.size(); ++i) {
      cum += a.m[i];
      if (*w < cum) return static_cast<uint32_t>(i);
    }
  }
}

Rational rejection_expected_bits(const mpz_class& z, uint32_t k) {
  if (z < 1) throw std::domain_error("total must be positive");
  const mpz_class pow = mpz_class(1) << k;
  if (!(z <= pow && (k == 0 || 2 * z > pow))) {
    throw std::domain_error("bit width does not bracket the total");
  }
  return Rational(k * pow, z);
}

std::optional<uint32_t> inversion_sample(const std::vector<Rational>& p,
                                         uint32_t k, BitSource& src,
                                         bool le_variant) {
  check_distribution(p);
  const std::optional<mpz_class> w = draw_word(k, src);
  if (!w.has_value()) return std::nullopt;
  const Rational u(*w, mpz_class(1) << k);
  Rational cum(0);
  for (size_t j = 0; j < p.size(); ++j) {
    cum += p[j];
    if (le_variant ? (u <= cum) : (u < cum)) return static_cast<uint32_t>(j);
  }
  // Unreachable for true distributions: u < 1 == final cumulative sum.
  return static_cast<uint32_t>(p.size() - 1);
}

std::vector<Rational> inversion_output_distribution(const std::vector<Rational>& p,
                                                    uint32_t k,
                                                    bool le_variant) {
  check_distribution(p);
  const size_t n = p.size();
  const mpz_class pow = mpz_class(1) << k;
  std::vector<mpz_class> terms(n, 0);
  Rational cum_prev(0);
  Rational cum(0);
  for (size_t j = 0; j < n; ++j) {
    cum += p[j];
    const Rational scaled = Rational(pow) * cum;
    const Rational scaled_prev = Rational(pow) * cum_prev;
    if (!le_variant) {
      terms[j] = scaled.ceil() - scaled_prev.ceil();
    } else if (j == 0) {
      terms[j] = scaled.floor() + (cum == Rational(1) ? 0 : 1);
    } else {
      mpz_class t = scaled.ceil() - scaled_prev.floor();
      if (!(scaled.is_integer() && cum != Rational(1))) t -= 1;
      if (t < 0) t = 0;
      terms[j] = t;
    }
    cum_prev = cum;
  }
  mpz_class total = 0;
  for (const mpz_class& t : terms) total += t;
  if (total == 0) throw std::domain_error("inversion terms sum to zero");
  std::vector<Rational> out(n);
  for (size_t j = 0; j < n; ++j) out[j] = Rational(terms[j], total);
  return out;
}

}  // namespace optsample
