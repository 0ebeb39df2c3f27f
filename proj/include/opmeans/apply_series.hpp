#pragma once

#include <opmeans/grid_field.hpp>
#include <opmeans/plane_wave.hpp>
#include <opmeans/poly_field.hpp>
#include <opmeans/series.hpp>

#include <functional>
#include <iostream>
#include <string>

namespace opmeans {

// Non-fatal diagnostics (series truncation heuristics and the like) go
// through this hook; default is a line on stderr.
inline std::function<void(const std::string&)>& warning_handler() {
  static std::function<void(const std::string&)> h = [](const std::string& msg) {
    std::cerr << "opmeans: warning: " << msg << "\n";
  };
  return h;
}

inline void warn(const std::string& msg) {
  if (warning_handler()) warning_handler()(msg);
}

// ---------------------------------------------------------------------------
// Apply a truncated operator series sum_j c_j D^j (D = Laplacian, any
// argument scale already folded into the coefficients) to a field.
//
// The rational overloads round each coefficient exactly once; callers that
// compare two series routes therefore get bit-identical fields whenever the
// underlying rationals agree.
// ---------------------------------------------------------------------------

// PolyField: Horner in the symbolic Laplacian (exact in exact arithmetic).
inline PolyField apply_series(const PolyField& f, const RealSeries& s) {
  const int n = s.order();
  PolyField acc = f.scaled(s[n]);
  for (int j = n - 1; j >= 0; --j) acc = acc.laplacian().plus(f, s[j]);
  return acc;
}

// PlaneWaveField: the eigenfunction shortcut, Horner at lambda = -|k|^2.
inline PlaneWaveField apply_series(const PlaneWaveField& f, const RealSeries& s) {
  const double lambda = f.eigenvalue();
  double acc = s[s.order()];
  for (int j = s.order() - 1; j >= 0; --j) acc = acc * lambda + s[j];
  return f.with_amplitude(f.amplitude() * acc);
}

// GridField: truncated symbol, i.e. the same Horner polynomial evaluated at
// each grid eigenvalue.  Warns (without failing) when the top retained term
// is not small at the largest grid wavenumber — the heuristic for "order too
// low for this band".
inline GridField apply_series(const GridField& f, const RealSeries& s) {
  const int n = s.order();
  if (n >= 1) {
    const double lamMax = f.max_wavenumber_norm() * f.max_wavenumber_norm();
    double mag = 0.0, top = std::abs(s[n]);
    double p = 1.0;
    for (int j = 0; j <= n; ++j) {
      mag = std::max(mag, std::abs(s[j]) * p);
      p *= lamMax;
    }
    top *= p / lamMax;
    if (mag > 0.0 && top > 1e-6 * mag)
      warn("apply_series: top series term is not small at the grid band edge "
           "(order " + std::to_string(n) + "); consider a higher order or the "
           "spectral mode");
  }
  return f.apply({.symbol = [&s](double lambda) {
    double acc = s[s.order()];
    for (int j = s.order() - 1; j >= 0; --j) acc = acc * lambda + s[j];
    return acc;
  }});
}

template <class Field>
Field apply_series(const Field& f, const RationalSeries& s) {
  return apply_series(f, to_real(s));
}

// Convenience overloads for series kept in a dimensionless argument: applies
// sum_j c_j scale^j D^j by folding the scale into the coefficients first.
template <class Field>
Field apply_series(const Field& f, const RealSeries& s, double scale) {
  return apply_series(f, s.scaled(scale));
}

template <class Field>
Field apply_series(const Field& f, const RationalSeries& s, const Rational& scale) {
  return apply_series(f, s.scaled(scale));
}

}  // namespace opmeans
