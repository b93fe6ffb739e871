#include "optsample/extreal.hpp"

namespace optsample {

int ExtReal::compare(const ExtReal& a, const ExtReal& b, const BigFloat* tol) {
  auto rank = [](const ExtReal& x) { return x.is_neg_inf() ? -1 : (x.is_pos_inf() ? 1 : 0); };
  int ra = rank(a), rb = rank(b);
  if (ra != 0 || rb != 0) return ra < rb ? -1 : (ra > rb ? 1 : 0);
  if (a.is_exact() && b.is_exact()) {
    const Rational &qa = a.exact_value(), &qb = b.exact_value();
    if (tol != nullptr && !tol->is_zero()) {
      // Rare mixed path: apply the float tolerance to exact values too.
      BigFloat d = BigFloat::from_rational((qa - qb).abs(), tol->prec());
      if (d <= *tol) return 0;
    }
    return qa < qb ? -1 : (qa > qb ? 1 : 0);
  }
  mpfr_prec_t prec = std::max(a.is_float() ? a.float_value().prec() : 2,
                              b.is_float() ? b.float_value().prec() : 2);
  BigFloat fa = a.to_bigfloat(prec), fb = b.to_bigfloat(prec);
  if (tol != nullptr && (fa - fb).abs() <= *tol) return 0;
  return fa.cmp(fb) < 0 ? -1 : (fa.cmp(fb) > 0 ? 1 : 0);
}

}  // namespace optsample
