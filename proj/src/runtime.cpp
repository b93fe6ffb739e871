#include "optsample/runtime.hpp"

#include <stdexcept>

namespace optsample {

uint64_t SplitMix64Source::next_word(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

FixedBitsSource::FixedBitsSource(uint64_t word, uint32_t count) {
  if (count > 64) throw std::invalid_argument("at most 64 bits fit in a word");
  bits_.resize(count);
  for (uint32_t i = 0; i < count; ++i) {
    bits_[i] = static_cast<uint8_t>((word >> (count - 1 - i)) & 1u);
  }
}

std::optional<uint32_t> sample_encoding(const LinearEncoding& e, BitSource& src) {
  const int64_t* enc = e.enc.data();
  int64_t c = 0;
  while (enc[c] >= 0) {
    const std::optional<int> b = src.next_bit();
    if (!b.has_value()) return std::nullopt;
    c = enc[c + *b];
  }
  return static_cast<uint32_t>(-enc[c] - 1);
}

std::optional<uint32_t> sample_matrix(const ProbabilityMatrix& pm, BitSource& src) {
  int64_t d = 0;
  uint32_t c = 0;
  for (;;) {
    const std::optional<int> b = src.next_bit();
    if (!b.has_value()) return std::nullopt;
    d = 2 * d + (1 - *b);
    for (size_t r = 0; r < pm.n; ++r) {
      d -= pm.at(r, c);
      if (d == -1) return static_cast<uint32_t>(r);
    }
    if (c == pm.k - 1) {
      if (pm.l == pm.k) {
        throw StructuralError(
            "matrix walk ran past the last column of a terminating matrix");
      }
      c = pm.l;
    } else {
      ++c;
    }
  }
}

EnumerationReport enumerate_outcomes(
    const std::function<std::optional<uint32_t>(BitSource&)>& sampler, size_t n,
    uint32_t k) {
  if (k > 24) throw std::domain_error("enumeration is limited to 24-bit strings");
  EnumerationReport report;
  report.masses.assign(n, Rational(0));
  const uint64_t total = uint64_t{1} << k;
  std::vector<mpz_class> counts(n, 0);
  mpz_class unresolved = 0;
  mpz_class bits_sum = 0;
  for (uint64_t w = 0; w < total; ++w) {
    FixedBitsSource src(w, k);
    const std::optional<uint32_t> outcome = sampler(src);
    if (outcome.has_value()) {
      if (*outcome >= n) {
        throw StructuralError("sampler produced an out-of-range outcome");
      }
      counts[*outcome] += 1;
      bits_sum += src.bits_consumed();
    } else {
      unresolved += 1;
      bits_sum += k;
    }
  }
  const Rational scale(mpz_class(1), mpz_class(mpz_class(1) << k));
  for (size_t i = 0; i < n; ++i) {
    report.masses[i] = Rational(counts[i]) * scale;
  }
  report.unresolved_mass = Rational(unresolved) * scale;
  report.expected_bits_truncated = Rational(bits_sum) * scale;
  return report;
}

}  // namespace optsample
