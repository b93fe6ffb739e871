#pragma once

#include <random>
#include <vector>

#include "optsample/divergence.hpp"
#include "optsample/optimize.hpp"
#include "optsample/rational.hpp"

namespace testutil {

using optsample::Assignment;
using optsample::DivergenceKind;
using optsample::EvalContext;
using optsample::Generator;
using optsample::Rational;

inline std::vector<Rational> binomial_pmf(unsigned n, const Rational& p) {
  std::vector<Rational> out;
  const Rational q = Rational(1) - p;
  for (unsigned i = 0; i <= n; ++i) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), n, i);
    Rational term(c);
    for (unsigned j = 0; j < i; ++j) term = term * p;
    for (unsigned j = 0; j < n - i; ++j) term = term * q;
    out.push_back(term);
  }
  return out;
}

// Random rational distribution with occasional zero entries.
inline std::vector<Rational> random_distribution(std::mt19937_64& rng, size_t n,
                                                 unsigned long max_weight = 20,
                                                 bool allow_zero = true) {
  std::vector<Rational> p(n);
  Rational sum(0);
  for (size_t i = 0; i < n; ++i) {
    unsigned long w = rng() % (max_weight + 1);
    if (!allow_zero && w == 0) w = 1;
    if (i + 1 == n && sum.is_zero() && w == 0) w = 1;
    p[i] = Rational(w);
    sum += p[i];
  }
  for (auto& r : p) r = r / sum;
  return p;
}

// Random non-degenerate assignment of Z units to n outcomes (no entry takes
// everything; zero entries allowed).
inline Assignment random_assignment(std::mt19937_64& rng, const mpz_class& z,
                                    size_t n) {
  Assignment a;
  a.z = z;
  a.m.assign(n, 0);
  const unsigned long zu = static_cast<unsigned long>(z.get_ui());
  for (unsigned long u = 0; u < zu; ++u) a.m[rng() % n] += 1;
  // Break up a degenerate pile so the matrix path is exercised.
  for (size_t i = 0; i < n && n > 1; ++i) {
    if (a.m[i] == z) {
      a.m[i] -= 1;
      a.m[(i + 1) % n] += 1;
    }
  }
  return a;
}

inline DivergenceKind kind_of(Generator g, const Rational& alpha = Rational(0)) {
  return DivergenceKind{g, alpha};
}

inline const std::vector<std::pair<DivergenceKind, EvalContext>>& catalog() {
  static const std::vector<std::pair<DivergenceKind, EvalContext>> kinds = {
      {kind_of(Generator::kTotalVariation), EvalContext::exact()},
      {kind_of(Generator::kPearsonChi2), EvalContext::exact()},
      {kind_of(Generator::kTriangular), EvalContext::exact()},
      {kind_of(Generator::kHellinger), EvalContext::flt()},
      {kind_of(Generator::kReverseKL), EvalContext::flt()},
      {kind_of(Generator::kForwardKL), EvalContext::flt()},
      {kind_of(Generator::kAlpha, Rational(0)), EvalContext::flt()},
      {kind_of(Generator::kAlpha, Rational(3)), EvalContext::flt()},
      {kind_of(Generator::kAlpha, Rational(-3)), EvalContext::flt()},
  };
  return kinds;
}

}  // namespace testutil
