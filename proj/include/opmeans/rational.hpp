#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace opmeans {

// Exact rational scalar used for all series coefficients.  Conversion from
// double is exact (doubles are dyadic rationals), which several exactness
// guarantees in meanops rely on.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string rational_str(const Rational& q) { return q.str(); }

}  // namespace opmeans
