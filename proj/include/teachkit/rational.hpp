#pragma once

#include <boost/rational.hpp>
#include <string>

namespace teachkit {

// Degree averages and ANCTD values must be exact; the additivity laws they
// obey are equalities, not approximations.
using Rational = boost::rational<long long>;

inline long long ceil_rational(const Rational& r) {
  long long q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
  return q;
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace teachkit
