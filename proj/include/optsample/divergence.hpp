#pragma once

#include <string>
#include <vector>

#include "optsample/extreal.hpp"
#include "optsample/rational.hpp"

namespace optsample {

// f-divergence generators: convex g with g(1) = 0; the divergence of an
// approximation M/Z from a target p is  sum_i p_i * g(M_i / (Z p_i)).
enum class Generator {
  kTotalVariation,      // |t - 1| / 2
  kHellinger,           // (sqrt(t) - 1)^2
  kPearsonChi2,         // (t - 1)^2
  kTriangular,          // (t - 1)^2 / (t + 1)
  kReverseKL,           // t log2 t
  kForwardKL,           // -log2 t
  kAlpha,               // 4 (1 - t^((1+a)/2)) / (1 - a^2),  a^2 != 1
};

struct DivergenceKind {
  Generator gen = Generator::kTotalVariation;
  Rational alpha;  // meaningful only for kAlpha

  // Kinds whose generator is rational in t admit exact evaluation.
  bool exact_capable() const {
    return gen == Generator::kTotalVariation || gen == Generator::kPearsonChi2 ||
           gen == Generator::kTriangular;
  }
  std::string name() const;
  // Accepts: tv, hellinger, pearson-chi2, triangular, reverse-kl, forward-kl,
  // alpha:<rational>.
  static DivergenceKind parse(const std::string& name);
};

enum class EvalMode { kExact, kFloat };

struct EvalContext {
  EvalMode mode = EvalMode::kExact;
  long mantissa_bits = 256;

  // Near-tie width for float-mode comparisons: 2^-(mantissa - 16). Exact mode
  // compares exactly (zero tolerance).
  BigFloat tolerance() const {
    if (mode == EvalMode::kExact) return BigFloat(64);
    return BigFloat::pow2(-(mantissa_bits - 16), 64);
  }
  static EvalContext exact() { return {EvalMode::kExact, 256}; }
  static EvalContext flt(long mantissa = 256) { return {EvalMode::kFloat, mantissa}; }
};

// Throws if the kind cannot be evaluated under the context (exact mode with an
// irrational generator).
void validate_context(const DivergenceKind& kind, const EvalContext& ctx);

// g(t) for t in [0, +inf]. Finite t >= 0 uses the generator formula with each
// kind's limit at 0; t = +inf returns +inf where that is the limit and raises
// a domain error where the limit is -inf (forward KL, alpha with |a| < 1).
ExtReal gen_eval(const DivergenceKind& kind, const ExtReal& t, const EvalContext& ctx);

// lim_{u->inf} g(u)/u: the per-unit contribution of mass placed on an outcome
// with p_i = 0.
ExtReal slope_at_infinity(const DivergenceKind& kind);

// sum_i p_i g(M_i/(Z p_i)), with zero-probability entries contributing
// (M_i/Z) * slope_at_infinity. Requires |M| = |p|, M_i >= 0, Z >= 1.
ExtReal divergence(const std::vector<Rational>& p, const std::vector<mpz_class>& m,
                   const mpz_class& z, const DivergenceKind& kind, const EvalContext& ctx);

}  // namespace optsample
