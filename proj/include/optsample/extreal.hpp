#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "optsample/bigfloat.hpp"
#include "optsample/rational.hpp"

namespace optsample {

// Extended real value: exact rational, high-precision binary float, or an
// infinity. Divergence values live in [0, +inf]; -inf can only appear in step
// costs (an infinitely improving move, e.g. incrementing M_i = 0 under a
// generator with g(0) = +inf). Opposite infinities never combine: their sum is
// a domain error rather than a silent NaN.
class ExtReal {
 public:
  ExtReal() : v_(Rational(0)) {}
  static ExtReal exact(Rational q) { return ExtReal(std::move(q)); }
  static ExtReal flt(BigFloat f) {
    if (f.is_nan()) throw std::domain_error("ExtReal: NaN");
    if (f.is_inf()) return f.sign() > 0 ? pos_inf() : neg_inf();
    return ExtReal(std::move(f));
  }
  static ExtReal pos_inf() { return ExtReal(Inf{+1}); }
  static ExtReal neg_inf() { return ExtReal(Inf{-1}); }

  bool is_pos_inf() const { return std::holds_alternative<Inf>(v_) && std::get<Inf>(v_).sign > 0; }
  bool is_neg_inf() const { return std::holds_alternative<Inf>(v_) && std::get<Inf>(v_).sign < 0; }
  bool is_finite() const { return !std::holds_alternative<Inf>(v_); }
  bool is_exact() const { return std::holds_alternative<Rational>(v_); }
  bool is_float() const { return std::holds_alternative<BigFloat>(v_); }

  const Rational& exact_value() const {
    if (!is_exact()) throw std::logic_error("ExtReal: not an exact value");
    return std::get<Rational>(v_);
  }
  const BigFloat& float_value() const {
    if (!is_float()) throw std::logic_error("ExtReal: not a float value");
    return std::get<BigFloat>(v_);
  }

  // Finite value as a BigFloat at the given precision (exact values rounded once).
  BigFloat to_bigfloat(mpfr_prec_t prec) const {
    if (is_exact()) return BigFloat::from_rational(exact_value(), prec);
    if (is_float()) return float_value();
    throw std::logic_error("ExtReal: infinite value has no BigFloat form");
  }

  friend ExtReal operator+(const ExtReal& a, const ExtReal& b) {
    if (!a.is_finite() || !b.is_finite()) {
      int sa = a.is_finite() ? 0 : (a.is_pos_inf() ? 1 : -1);
      int sb = b.is_finite() ? 0 : (b.is_pos_inf() ? 1 : -1);
      if (sa * sb == -1) throw std::domain_error("ExtReal: inf + (-inf)");
      return (sa + sb) > 0 ? pos_inf() : neg_inf();
    }
    if (a.is_exact() && b.is_exact()) return exact(a.exact_value() + b.exact_value());
    mpfr_prec_t prec = std::max(a.is_float() ? a.float_value().prec() : 2,
                                b.is_float() ? b.float_value().prec() : 2);
    return flt(a.to_bigfloat(prec) + b.to_bigfloat(prec));
  }
  friend ExtReal operator-(const ExtReal& a, const ExtReal& b) { return a + (-b); }
  ExtReal operator-() const {
    if (is_pos_inf()) return neg_inf();
    if (is_neg_inf()) return pos_inf();
    if (is_exact()) return exact(-exact_value());
    return flt(-float_value());
  }

  // Multiplication by a strictly signed finite scalar; 0 * inf is a logic
  // error (the zero-probability convention is handled before scaling).
  friend ExtReal operator*(const Rational& c, const ExtReal& a) {
    if (!a.is_finite()) {
      if (c.is_zero()) throw std::domain_error("ExtReal: 0 * inf");
      return (c.sign() > 0) == a.is_pos_inf() ? pos_inf() : neg_inf();
    }
    if (a.is_exact()) return exact(c * a.exact_value());
    return flt(BigFloat::from_rational(c, a.float_value().prec()) * a.float_value());
  }

  // Three-way compare; tolerance (if given) makes |a - b| <= tol a tie for
  // finite values. Infinities of the same sign are ties.
  static int compare(const ExtReal& a, const ExtReal& b, const BigFloat* tol = nullptr);

  std::string str() const {
    if (is_pos_inf()) return "inf";
    if (is_neg_inf()) return "-inf";
    if (is_exact()) return exact_value().str();
    return float_value().str();
  }

  double to_double() const {
    if (is_pos_inf()) return HUGE_VAL;
    if (is_neg_inf()) return -HUGE_VAL;
    if (is_exact()) return exact_value().to_double();
    return float_value().to_double();
  }

 private:
  struct Inf { int sign; };
  explicit ExtReal(Rational q) : v_(std::move(q)) {}
  explicit ExtReal(BigFloat f) : v_(std::move(f)) {}
  explicit ExtReal(Inf i) : v_(i) {}
  std::variant<Rational, BigFloat, Inf> v_;
};

}  // namespace optsample
