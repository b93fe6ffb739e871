#pragma once

#include <cstdint>
#include <vector>

#include "optsample/divergence.hpp"
#include "optsample/numsys.hpp"

namespace optsample {

// Numerators of a Z-type distribution: M_i / Z with sum(M) == Z.
struct Assignment {
  std::vector<mpz_class> m;
  mpz_class z;
};

// One optimizer move, for objective-trace verification in tests.
struct Move {
  int step = 0;           // 3 (pairwise swap) or 7 (directional fill)
  size_t inc_index = 0;   // incremented index (step 3, or step 7 with delta=+1)
  size_t dec_index = 0;   // decremented index (step 3, or step 7 with delta=-1)
  bool has_inc = false;
  bool has_dec = false;
  ExtReal cost;           // the move's evaluated cost at application time
};

struct OptimizeStats {
  size_t swap_iterations = 0;  // step-3 loop count (theorem bound: <= n)
  mpz_class shortfall = 0;     // S = sum(M) - Z before the fill loop (|S| <= n-1
                               // for nonnegative generators)
  std::vector<Move> moves;     // filled only when tracing is requested
};

// Cost of changing M_i by delta (+1/-1):
//   p_i * (g((M_i+delta)/(Z p_i)) - g(M_i/(Z p_i))),
// +inf when M_i + delta leaves [0, Z]. Zero-probability entries use the
// slope-at-infinity convention; an infinitely improving move (leaving a state
// whose contribution is +inf) is -inf.
ExtReal step_cost(const std::vector<Rational>& p, const Assignment& a, size_t i, int delta,
                  const DivergenceKind& kind, const EvalContext& ctx);

// Closest Z-type approximation of p for a fixed denominator Z: greedy
// per-entry rounding, pairwise swaps while a strictly improving pair exists
// (at most n iterations), then |S| directional fills to restore sum(M) = Z.
// Ties everywhere resolve to the lowest index (float near-ties are ties).
// Zero-probability entries are stripped and reinserted with M_i = 0.
Assignment optimize_z(const std::vector<Rational>& p, const mpz_class& z,
                      const DivergenceKind& kind, const EvalContext& ctx,
                      OptimizeStats* stats = nullptr, bool trace = false);

// Exhaustive argmin over every length-n composition of Z (guarded to <= 10^6
// candidates). Equal-objective ties keep the lexicographically greatest M,
// matching what lowest-index tie-breaking produces through the fill loop.
Assignment brute_force_optimum(const std::vector<Rational>& p, const mpz_class& z,
                               const DivergenceKind& kind, const EvalContext& ctx);

enum class ApproxClass { kAllEntropyOptimal, kBoundedDyadic };

struct ApproxResult {
  PrecisionSpec spec;
  Assignment assignment;
  DivergenceKind kind;
  EvalContext ctx;
  ExtReal error;
};

// Best k-bit approximation: sweeps l = 0..k over the (k, l) number systems
// (or just l = k for the bounded-dyadic class) and keeps the smallest error;
// error ties prefer the largest l.
ApproxResult closest_approx(const std::vector<Rational>& p, uint32_t k,
                            const DivergenceKind& kind, const EvalContext& ctx,
                            ApproxClass cls = ApproxClass::kAllEntropyOptimal);

}  // namespace optsample
