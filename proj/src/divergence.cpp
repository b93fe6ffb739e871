#include "optsample/divergence.hpp"

#include <stdexcept>

namespace optsample {

std::string DivergenceKind::name() const {
  switch (gen) {
    case Generator::kTotalVariation: return "tv";
    case Generator::kHellinger: return "hellinger";
    case Generator::kPearsonChi2: return "pearson-chi2";
    case Generator::kTriangular: return "triangular";
    case Generator::kReverseKL: return "reverse-kl";
    case Generator::kForwardKL: return "forward-kl";
    case Generator::kAlpha: return "alpha:" + alpha.str();
  }
  throw std::logic_error("unreachable");
}

DivergenceKind DivergenceKind::parse(const std::string& name) {
  if (name == "tv") return {Generator::kTotalVariation, {}};
  if (name == "hellinger") return {Generator::kHellinger, {}};
  if (name == "pearson-chi2") return {Generator::kPearsonChi2, {}};
  if (name == "triangular") return {Generator::kTriangular, {}};
  if (name == "reverse-kl") return {Generator::kReverseKL, {}};
  if (name == "forward-kl") return {Generator::kForwardKL, {}};
  if (name.rfind("alpha:", 0) == 0) {
    Rational a = Rational::parse(name.substr(6));
    if (a == Rational(1) || a == Rational(-1)) {
      throw std::domain_error("alpha divergence: alpha^2 must differ from 1");
    }
    return {Generator::kAlpha, a};
  }
  throw std::invalid_argument("unknown divergence '" + name + "'");
}

void validate_context(const DivergenceKind& kind, const EvalContext& ctx) {
  if (ctx.mode == EvalMode::kExact && !kind.exact_capable()) {
    throw std::domain_error("divergence '" + kind.name() + "' requires float mode");
  }
  if (ctx.mode == EvalMode::kFloat && ctx.mantissa_bits < 24) {
    throw std::domain_error("float mode requires at least 24 mantissa bits");
  }
  if (kind.gen == Generator::kAlpha && (kind.alpha == Rational(1) || kind.alpha == Rational(-1))) {
    throw std::domain_error("alpha divergence: alpha^2 must differ from 1");
  }
}

namespace {

ExtReal eval_exact(const DivergenceKind& kind, const Rational& t) {
  Rational d = t - Rational(1);
  switch (kind.gen) {
    case Generator::kTotalVariation:
      return ExtReal::exact(d.abs() / Rational(2));
    case Generator::kPearsonChi2:
      return ExtReal::exact(d * d);
    case Generator::kTriangular:
      return ExtReal::exact(d * d / (t + Rational(1)));
    default:
      throw std::logic_error("eval_exact: kind is not exact-capable");
  }
}

ExtReal eval_float(const DivergenceKind& kind, const Rational& t, long prec) {
  BigFloat tf = BigFloat::from_rational(t, prec);
  BigFloat one = BigFloat::from_long(1, prec);
  switch (kind.gen) {
    case Generator::kTotalVariation:
      return ExtReal::flt((tf - one).abs() / BigFloat::from_long(2, prec));
    case Generator::kPearsonChi2: {
      BigFloat d = tf - one;
      return ExtReal::flt(d * d);
    }
    case Generator::kTriangular: {
      BigFloat d = tf - one;
      return ExtReal::flt(d * d / (tf + one));
    }
    case Generator::kHellinger: {
      BigFloat d = tf.sqrt() - one;
      return ExtReal::flt(d * d);
    }
    case Generator::kReverseKL:
      if (t.is_zero()) return ExtReal::exact(Rational(0));  // lim t log t = 0
      return ExtReal::flt(tf * tf.log2());
    case Generator::kForwardKL:
      if (t.is_zero()) return ExtReal::pos_inf();
      return ExtReal::flt(-tf.log2());
    case Generator::kAlpha: {
      Rational beta = (Rational(1) + kind.alpha) / Rational(2);
      BigFloat scale =
          BigFloat::from_long(4, prec) /
          (one - BigFloat::from_rational(kind.alpha * kind.alpha, prec));
      if (t.is_zero()) {
        // 0^beta is 0 for beta > 0, +inf for beta < 0 (i.e. alpha < -1, where
        // the negative scale times (1 - inf) still gives +inf).
        if (beta.sign() > 0) return ExtReal::flt(scale);
        return ExtReal::pos_inf();
      }
      BigFloat powed = tf.pow(BigFloat::from_rational(beta, prec));
      return ExtReal::flt(scale * (one - powed));
    }
    default:
      throw std::logic_error("eval_float: unhandled kind");
  }
}

}  // namespace

ExtReal gen_eval(const DivergenceKind& kind, const ExtReal& t, const EvalContext& ctx) {
  validate_context(kind, ctx);
  if (t.is_neg_inf()) throw std::domain_error("gen_eval: t must be nonnegative");
  if (t.is_pos_inf()) {
    switch (kind.gen) {
      case Generator::kTotalVariation:
      case Generator::kHellinger:
      case Generator::kPearsonChi2:
      case Generator::kTriangular:
      case Generator::kReverseKL:
        return ExtReal::pos_inf();
      case Generator::kForwardKL:
        throw std::domain_error("gen_eval: forward KL diverges to -inf at t = +inf");
      case Generator::kAlpha:
        if (kind.alpha > Rational(1)) return ExtReal::pos_inf();
        if (kind.alpha < Rational(-1)) {
          // Finite limit 4 / (1 - alpha^2).
          Rational lim = Rational(4) / (Rational(1) - kind.alpha * kind.alpha);
          if (ctx.mode == EvalMode::kExact) return ExtReal::exact(lim);
          return ExtReal::flt(BigFloat::from_rational(lim, ctx.mantissa_bits));
        }
        throw std::domain_error("gen_eval: alpha divergence with |alpha| < 1 diverges to -inf at t = +inf");
    }
  }
  const Rational& tq = t.is_exact()
                           ? t.exact_value()
                           : throw std::domain_error("gen_eval: t must be exact or +inf");
  if (tq.sign() < 0) throw std::domain_error("gen_eval: t must be nonnegative");
  if (ctx.mode == EvalMode::kExact) return eval_exact(kind, tq);
  return eval_float(kind, tq, ctx.mantissa_bits);
}

ExtReal slope_at_infinity(const DivergenceKind& kind) {
  switch (kind.gen) {
    case Generator::kTotalVariation: return ExtReal::exact(Rational(1, 2));
    case Generator::kHellinger: return ExtReal::exact(Rational(1));
    case Generator::kPearsonChi2: return ExtReal::pos_inf();
    case Generator::kTriangular: return ExtReal::exact(Rational(1));
    case Generator::kReverseKL: return ExtReal::pos_inf();
    case Generator::kForwardKL: return ExtReal::exact(Rational(0));
    case Generator::kAlpha:
      return kind.alpha > Rational(1) ? ExtReal::pos_inf() : ExtReal::exact(Rational(0));
  }
  throw std::logic_error("unreachable");
}

ExtReal divergence(const std::vector<Rational>& p, const std::vector<mpz_class>& m,
                   const mpz_class& z, const DivergenceKind& kind, const EvalContext& ctx) {
  validate_context(kind, ctx);
  if (p.size() != m.size()) throw std::invalid_argument("divergence: |p| != |M|");
  if (z < 1) throw std::domain_error("divergence: Z must be >= 1");
  ExtReal acc = ctx.mode == EvalMode::kExact
                    ? ExtReal::exact(Rational(0))
                    : ExtReal::flt(BigFloat::from_long(0, ctx.mantissa_bits));
  for (size_t i = 0; i < p.size(); ++i) {
    if (m[i] < 0) throw std::domain_error("divergence: M entries must be nonnegative");
    ExtReal term;
    if (p[i].is_zero()) {
      if (m[i] == 0) continue;
      ExtReal s = slope_at_infinity(kind);
      if (s.is_pos_inf()) return ExtReal::pos_inf();
      term = Rational(m[i], z) * s;
    } else {
      Rational t = Rational(m[i]) / (Rational(z) * p[i]);
      ExtReal gt = gen_eval(kind, ExtReal::exact(t), ctx);
      if (gt.is_pos_inf()) return ExtReal::pos_inf();
      term = p[i] * gt;
    }
    acc = acc + term;
  }
  return acc;
}

}  // namespace optsample
