#include "optsample/bigfloat.hpp"

#include <cmath>
#include <cstdlib>

namespace optsample {

std::string BigFloat::str() const {
  if (is_nan()) return "nan";
  if (is_inf()) return sign() > 0 ? "inf" : "-inf";
  if (is_zero()) return "0";
  size_t digits = static_cast<size_t>(std::ceil(static_cast<double>(prec()) * 0.30103)) + 2;
  mpfr_exp_t exp = 0;
  char* s = mpfr_get_str(nullptr, &exp, 10, digits, x_, MPFR_RNDN);
  std::string mant(s);
  mpfr_free_str(s);
  bool neg = !mant.empty() && mant[0] == '-';
  std::string body = neg ? mant.substr(1) : mant;
  // Strip trailing zeros (keep at least one digit).
  size_t last = body.find_last_not_of('0');
  body = body.substr(0, std::max<size_t>(last + 1, 1));
  // mpfr_get_str semantics: value = 0.body * 10^exp.
  std::string out = (neg ? "-" : "") + std::string("0.") + body + "e" + std::to_string(exp);
  return out;
}

}  // namespace optsample
