#pragma once

#include <opmeans/errors.hpp>
#include <opmeans/rational.hpp>

#include <algorithm>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace opmeans {

// ---------------------------------------------------------------------------
// Truncated power series in one formal variable t.  Throughout the library t
// stands for the Laplacian (with any radius/argument scale already folded into
// the coefficients), so a series [c0, c1, c2, ...] represents the operator
// c0 + c1*D + c2*D^2 + ...  truncated at `order`.
//
// Scalar is either Rational (exact pipelines) or double.
// ---------------------------------------------------------------------------
template <class Scalar>
class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw InvalidArgument("TruncatedSeries: empty coefficient list");
  }

  // The multiplicative identity 1 + 0*t + ... + 0*t^order.
  static TruncatedSeries identity(int order) {
    if (order < 0) throw InvalidArgument("TruncatedSeries: negative order");
    std::vector<Scalar> c(static_cast<size_t>(order) + 1, Scalar(0));
    c[0] = Scalar(1);
    return TruncatedSeries(std::move(c));
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const Scalar& operator[](int j) const { return c_.at(static_cast<size_t>(j)); }
  const std::vector<Scalar>& coeffs() const { return c_; }

  TruncatedSeries truncated(int newOrder) const {
    if (newOrder < 0 || newOrder > order())
      throw InvalidArgument("TruncatedSeries::truncated: order out of range");
    return TruncatedSeries(std::vector<Scalar>(c_.begin(), c_.begin() + newOrder + 1));
  }

  // Product truncated at the smaller of the two orders.
  TruncatedSeries convolve(const TruncatedSeries& o) const {
    const int n = std::min(order(), o.order());
    std::vector<Scalar> out(static_cast<size_t>(n) + 1, Scalar(0));
    for (int j = 0; j <= n; ++j) {
      Scalar acc(0);
      for (int i = 0; i <= j; ++i) acc += c_[static_cast<size_t>(i)] * o[j - i];
      out[static_cast<size_t>(j)] = acc;
    }
    return TruncatedSeries(std::move(out));
  }

  TruncatedSeries operator+(const TruncatedSeries& o) const { return combine(o, Scalar(1)); }
  TruncatedSeries operator-(const TruncatedSeries& o) const { return combine(o, Scalar(-1)); }

  TruncatedSeries times(const Scalar& s) const {
    std::vector<Scalar> out = c_;
    for (auto& v : out) v *= s;
    return TruncatedSeries(std::move(out));
  }

  // Substitute t -> s*t, i.e. c_j -> c_j * s^j.
  TruncatedSeries scaled(const Scalar& s) const {
    std::vector<Scalar> out = c_;
    Scalar p(1);
    for (size_t j = 1; j < out.size(); ++j) {
      p *= s;
      out[j] *= p;
    }
    return TruncatedSeries(std::move(out));
  }

  // Multiply by the monomial t^k (shifting coefficients up, same order).
  TruncatedSeries shifted(int k) const {
    if (k < 0) throw InvalidArgument("TruncatedSeries::shifted: negative shift");
    std::vector<Scalar> out(c_.size(), Scalar(0));
    for (size_t j = 0; j + static_cast<size_t>(k) < out.size(); ++j)
      out[j + static_cast<size_t>(k)] = c_[j];
    return TruncatedSeries(std::move(out));
  }

  bool is_zero() const {
    for (const auto& v : c_)
      if (v != Scalar(0)) return false;
    return true;
  }

  bool operator==(const TruncatedSeries& o) const { return c_ == o.c_; }

 private:
  TruncatedSeries combine(const TruncatedSeries& o, const Scalar& sign) const {
    const int n = std::min(order(), o.order());
    std::vector<Scalar> out(static_cast<size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) out[static_cast<size_t>(j)] = c_[static_cast<size_t>(j)] + sign * o[j];
    return TruncatedSeries(std::move(out));
  }

  std::vector<Scalar> c_;
};

using RationalSeries = TruncatedSeries<Rational>;
using RealSeries = TruncatedSeries<double>;

inline RealSeries to_real(const RationalSeries& s) {
  std::vector<double> c(s.coeffs().size());
  for (size_t j = 0; j < c.size(); ++j) c[j] = to_double(s.coeffs()[j]);
  return RealSeries(std::move(c));
}

// Rising factorial (a)_j = a (a+1) ... (a+j-1), exact.
inline Rational pochhammer(const Rational& a, int j) {
  Rational p(1);
  for (int i = 0; i < j; ++i) p *= a + Rational(i);
  return p;
}

// ---------------------------------------------------------------------------
// Generalized hypergeometric coefficient generator.
//
// coeffs_pfq produces the truncated series of
//   pFq(upper; lower; s*t) = sum_j  prod(upper)_j / prod(lower)_j * (s*t)^j / j!
// with all coefficients exact.  Lower parameters must avoid 0, -1, -2, ...
// ---------------------------------------------------------------------------
struct HypergeometricSpec {
  std::vector<Rational> upper;
  std::vector<Rational> lower;
  Rational argumentScale = Rational(1);
};

inline RationalSeries coeffs_pfq(const HypergeometricSpec& spec, int order) {
  if (order < 0) throw InvalidArgument("coeffs_pfq: negative order");
  for (const auto& b : spec.lower) {
    if (b <= 0 && denominator(b) == 1)
      throw PoleParameter("coeffs_pfq: lower parameter " + b.str() +
                          " is zero or a negative integer");
  }
  std::vector<Rational> c(static_cast<size_t>(order) + 1);
  Rational term(1);
  c[0] = term;
  for (int j = 0; j < order; ++j) {
    // term_{j+1} = term_j * prod(upper+j) / prod(lower+j) * s / (j+1)
    for (const auto& a : spec.upper) term *= a + Rational(j);
    for (const auto& b : spec.lower) term /= b + Rational(j);
    term *= spec.argumentScale;
    term /= Rational(j + 1);
    c[static_cast<size_t>(j) + 1] = term;
  }
  return RationalSeries(std::move(c));
}

// Multiplicative inverse of a series with nonzero constant term:
//   b_0 = 1/a_0,  b_j = -(1/a_0) * sum_{i=1..j} a_i b_{j-i}.
template <class Scalar>
TruncatedSeries<Scalar> reciprocal(const TruncatedSeries<Scalar>& s) {
  if (s[0] == Scalar(0))
    throw ZeroLeadingCoefficient("reciprocal: constant term is zero");
  const int n = s.order();
  std::vector<Scalar> b(static_cast<size_t>(n) + 1, Scalar(0));
  b[0] = Scalar(1) / s[0];
  for (int j = 1; j <= n; ++j) {
    Scalar acc(0);
    for (int i = 1; i <= j; ++i) acc += s[i] * b[static_cast<size_t>(j - i)];
    b[static_cast<size_t>(j)] = -acc / s[0];
  }
  return TruncatedSeries<Scalar>(std::move(b));
}

namespace detail {

// S^m for a series with constant term 1, via the first-order ODE recurrence
// g' S = m S' g  =>  g_j = (1/j) sum_{i=1..j} (i (m+1) - j) S_i g_{j-i}.
// Exponent and coefficients share a scalar type; division by j is exact for
// Rational and the usual rounding for double.
template <class Scalar>
TruncatedSeries<Scalar> power_recurrence(const TruncatedSeries<Scalar>& s, const Scalar& m) {
  if (s[0] != Scalar(1))
    throw LeadingCoefficientNotOne("real_power: constant term must be one");
  const int n = s.order();
  std::vector<Scalar> g(static_cast<size_t>(n) + 1, Scalar(0));
  g[0] = Scalar(1);
  for (int j = 1; j <= n; ++j) {
    Scalar acc(0);
    for (int i = 1; i <= j; ++i)
      acc += (Scalar(i) * (m + Scalar(1)) - Scalar(j)) * s[i] * g[static_cast<size_t>(j - i)];
    g[static_cast<size_t>(j)] = acc / Scalar(j);
  }
  return TruncatedSeries<Scalar>(std::move(g));
}

}  // namespace detail

// Exact m-th power for rational exponents (m = -1 reproduces reciprocal()).
inline RationalSeries real_power(const RationalSeries& s, const Rational& m) {
  return detail::power_recurrence<Rational>(s, m);
}

// Floating-point m-th power; the route for irrational exponents.  Same
// recurrence, coefficients in double.
inline RealSeries real_power(const RealSeries& s, double m) {
  return detail::power_recurrence<double>(s, m);
}

inline RealSeries real_power(const RationalSeries& s, double m) {
  return real_power(to_real(s), m);
}

// ---------------------------------------------------------------------------
// Terminating Gauss 2F1(a, -k; b; z) = sum_{j=0..k} (a)_j (-k)_j / (b)_j z^j / j!.
// Works for exact rational z as well as double.  b must not be one of
// 0, -1, ..., -(k-1) (the denominators actually reached).
// ---------------------------------------------------------------------------
template <class Z>
Z gauss2f1_terminating(const Rational& a, int k, const Rational& b, const Z& z) {
  if (k < 0) throw InvalidArgument("gauss2f1_terminating: negative k");
  for (int j = 0; j < k; ++j) {
    if (b + Rational(j) == 0)
      throw PoleParameter("gauss2f1_terminating: lower parameter pole at b+" +
                          std::to_string(j));
  }
  Z sum(1);
  Z term(1);
  for (int j = 0; j < k; ++j) {
    const Rational ratio =
        (a + Rational(j)) * Rational(-k + j) / ((b + Rational(j)) * Rational(j + 1));
    term = term * static_cast<Z>(ratio) * z;
    sum += term;
  }
  return sum;
}

inline double gauss2f1_terminating(const Rational& a, int k, const Rational& b, double z) {
  return gauss2f1_terminating<double>(a, k, b, z);
}

// Debug/CSV dump: one row "j,numerator,denominator" per coefficient.
inline std::string series_csv(const RationalSeries& s) {
  std::ostringstream out;
  out << "j,numerator,denominator\n";
  for (int j = 0; j <= s.order(); ++j)
    out << j << ',' << numerator(s[j]).str() << ',' << denominator(s[j]).str() << '\n';
  return out.str();
}

}  // namespace opmeans
