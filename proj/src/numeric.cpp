#include "nontan/numeric.hpp"

#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace nontan {

namespace {

unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

}  // namespace

PrecisionScope::PrecisionScope(unsigned bits)
    : previous_digits10_(BigFloat::default_precision()) {
  if (bits < 53) throw std::invalid_argument("precision below 53 bits");
  BigFloat::default_precision(bits_to_digits10(bits));
}

PrecisionScope::~PrecisionScope() { BigFloat::default_precision(previous_digits10_); }

unsigned current_precision_bits() {
  return static_cast<unsigned>(std::floor(BigFloat::default_precision() / 0.30102999566398120));
}

BigFloat big_pi() { return boost::multiprecision::acos(BigFloat(-1)); }

BigFloat neg_infinity() { return -std::numeric_limits<BigFloat>::infinity(); }

bool is_neg_infinity(const BigFloat& x) { return boost::multiprecision::isinf(x) && x < 0; }

BigFloat log_add(const BigFloat& a, const BigFloat& b) {
  if (is_neg_infinity(a)) return b;
  if (is_neg_infinity(b)) return a;
  const BigFloat& hi = a > b ? a : b;
  const BigFloat& lo = a > b ? b : a;
  return hi + boost::multiprecision::log1p(boost::multiprecision::exp(lo - hi));
}

BigFloat log_sum(const std::vector<BigFloat>& terms) {
  BigFloat acc = neg_infinity();
  for (const auto& t : terms) acc = log_add(acc, t);
  return acc;
}

BigFloat to_big(const Rational& r) {
  return BigFloat(boost::multiprecision::numerator(r).str()) /
         BigFloat(boost::multiprecision::denominator(r).str());
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  // mant * 2^53 is an integer for every double.
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r(scaled);
  exp -= 53;
  if (exp >= 0) {
    r *= Rational(BigInt(1) << exp);
  } else {
    r /= Rational(BigInt(1) << -exp);
  }
  return r;
}

double to_double(const BigFloat& x) { return x.convert_to<double>(); }

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_decimal(const BigFloat& x) {
  return x.str(BigFloat::default_precision() + 2, std::ios_base::scientific);
}

BigFloat from_decimal(const std::string& s) { return BigFloat(s); }

std::string to_fraction(const Rational& r) {
  const BigInt den = boost::multiprecision::denominator(r);
  std::string out = boost::multiprecision::numerator(r).str();
  if (den != 1) out += "/" + den.str();
  return out;
}

Rational from_fraction(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

double sphere_area(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (d == 1) return 2.0;
  return 2.0 * std::pow(M_PI, d / 2.0) / boost::math::tgamma(d / 2.0);
}

BigFloat big_sphere_area(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (d == 1) return BigFloat(2);
  const BigFloat half_d = BigFloat(d) / 2;
  return 2 * boost::multiprecision::pow(big_pi(), half_d) / boost::multiprecision::tgamma(half_d);
}

}  // namespace nontan
