#pragma once

#include <mpfr.h>

#include <algorithm>
#include <string>

#include "optsample/rational.hpp"

namespace optsample {

// Correctly rounded binary floating point with explicit mantissa width.
// All operations round to nearest-even and produce a result whose precision is
// the max of the operand precisions, so a fixed-width computation stays at its
// configured width end to end (deterministic across platforms).
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 256) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
  BigFloat(const BigFloat& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_swap(x_, o.x_); }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) { mpfr_set_prec(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    if (this != &o) mpfr_swap(x_, o.x_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(x_); }

  static BigFloat from_rational(const Rational& q, mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_set_q(r.x_, q.raw().get_mpq_t(), MPFR_RNDN);
    return r;
  }
  static BigFloat from_long(long v, mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_set_si(r.x_, v, MPFR_RNDN);
    return r;
  }
  // 2^e for integer e (exact).
  static BigFloat pow2(long e, mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_set_ui_2exp(r.x_, 1, e, MPFR_RNDN);
    return r;
  }

  mpfr_prec_t prec() const { return mpfr_get_prec(x_); }
  bool is_nan() const { return mpfr_nan_p(x_) != 0; }
  bool is_inf() const { return mpfr_inf_p(x_) != 0; }
  bool is_zero() const { return mpfr_zero_p(x_) != 0; }
  int sign() const { return mpfr_sgn(x_); }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_add(r.x_, a.x_, b.x_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.x_, a.x_, b.x_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_mul(r.x_, a.x_, b.x_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_div(r.x_, a.x_, b.x_, MPFR_RNDN);
    return r;
  }
  BigFloat operator-() const {
    BigFloat r(prec());
    mpfr_neg(r.x_, x_, MPFR_RNDN);
    return r;
  }

  BigFloat abs() const {
    BigFloat r(prec());
    mpfr_abs(r.x_, x_, MPFR_RNDN);
    return r;
  }
  BigFloat sqrt() const {
    BigFloat r(prec());
    mpfr_sqrt(r.x_, x_, MPFR_RNDN);
    return r;
  }
  BigFloat log2() const {
    BigFloat r(prec());
    mpfr_log2(r.x_, x_, MPFR_RNDN);
    return r;
  }
  // this^e, via MPFR's correctly rounded pow.
  BigFloat pow(const BigFloat& e) const {
    BigFloat r(std::max(prec(), e.prec()));
    mpfr_pow(r.x_, x_, e.x_, MPFR_RNDN);
    return r;
  }

  // Total order on non-NaN values (infinities compare as expected).
  int cmp(const BigFloat& o) const { return mpfr_cmp(x_, o.x_); }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return a.cmp(b) == 0; }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return a.cmp(b) < 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return a.cmp(b) <= 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return a.cmp(b) > 0; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return a.cmp(b) >= 0; }

  double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }

  // Shortest-ish deterministic decimal: enough digits to round-trip at this
  // precision (prec * log10(2) + 2).
  std::string str() const;

 private:
  mpfr_t x_;
};

}  // namespace optsample
