#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "optsample/optimize.hpp"
#include "optsample/runtime.hpp"

namespace optsample {

// Smallest k with Z <= 2^k (so 2^(k-1) < Z <= 2^k); k = 0 when Z == 1.
uint32_t rejection_bit_width(const mpz_class& z);

// Draws k-bit words MSB first until one lands below Z, then buckets it by the
// cumulative sums of M. Exact over the assignment, needs unboundedly many
// bits in the worst case.
std::optional<uint32_t> rejection_sample(const Assignment& a, BitSource& src);

// Expected flips per output: k * 2^k / Z for the width above.
Rational rejection_expected_bits(const mpz_class& z, uint32_t k);

// Draws exactly k bits as U = W/2^k and returns the first outcome whose
// cumulative probability passes U. The default compares with strict <; the
// widely shipped variant compares with <= (see the closed forms below).
std::optional<uint32_t> inversion_sample(const std::vector<Rational>& p,
                                         uint32_t k, BitSource& src,
                                         bool le_variant = false);

// Exact output distribution of the k-bit inversion sampler, normalized by the
// sum of the per-outcome word counts.
//   strict <:  w_j = ceil(2^k c_j) - ceil(2^k c_{j-1})     (sums to 2^k)
//   <= variant: w_1 = floor(2^k p_1) + [p_1 != 1], and for j >= 2
//     w_j = floor(2^k c_j) - floor(2^k c_{j-1})
//           + [c_j != 1 and 2^k c_j integral] - [c_{j-1} != 1 and 2^k c_{j-1} integral]
// where c_j are cumulative probabilities.
std::vector<Rational> inversion_output_distribution(const std::vector<Rational>& p,
                                                    uint32_t k,
                                                    bool le_variant = false);

}  // namespace optsample
