#include "optsample/rational.hpp"

namespace optsample {

Rational Rational::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("Rational::parse: empty string");
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(mpz_class(text, 10));
    }
    mpz_class num(text.substr(0, slash), 10);
    mpz_class den(text.substr(slash + 1), 10);
    if (den == 0) throw std::domain_error("Rational::parse: zero denominator");
    return Rational(num, den);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("Rational::parse: malformed rational '" + text + "'");
  }
}

std::string Rational::str() const {
  if (is_integer()) return num().get_str();
  return num().get_str() + "/" + den().get_str();
}

void check_distribution(const std::vector<Rational>& p) {
  if (p.empty()) throw std::invalid_argument("distribution is empty");
  Rational sum;
  for (const auto& e : p) {
    if (e.sign() < 0) throw std::domain_error("distribution has a negative entry");
    sum += e;
  }
  if (sum != Rational(1)) {
    throw std::domain_error("distribution entries sum to " + sum.str() + ", expected 1");
  }
}

}  // namespace optsample
