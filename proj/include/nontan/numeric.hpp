#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace nontan {

using BigFloat = boost::multiprecision::mpfr_float;
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr unsigned kDefaultPrecisionBits = 256;

// Sets the working precision of newly created BigFloat values on this
// thread and restores the previous one on destruction.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned previous_digits10_;
};

unsigned current_precision_bits();

BigFloat big_pi();
BigFloat neg_infinity();
bool is_neg_infinity(const BigFloat& x);

// log(exp(a) + exp(b)) without leaving the log domain.
BigFloat log_add(const BigFloat& a, const BigFloat& b);
// log of a sum of exp(terms).
BigFloat log_sum(const std::vector<BigFloat>& terms);

BigFloat to_big(const Rational& r);
Rational exact_rational(double x);  // every finite double is a dyadic rational
double to_double(const BigFloat& x);
double to_double(const Rational& r);

// Decimal string carrying the full working precision, and its inverse.
std::string to_decimal(const BigFloat& x);
BigFloat from_decimal(const std::string& s);

// "n/d" (or "n" when d == 1) and its inverse.
std::string to_fraction(const Rational& r);
Rational from_fraction(const std::string& s);

// Surface measure of the unit sphere S^{d-1}; 2 for d = 1 (counting measure on {-1, +1}).
double sphere_area(int d);
BigFloat big_sphere_area(int d);

}  // namespace nontan
