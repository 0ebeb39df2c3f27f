#pragma once

#include <opmeans/apply_series.hpp>
#include <opmeans/grid_field.hpp>
#include <opmeans/kernels.hpp>
#include <opmeans/plane_wave.hpp>
#include <opmeans/poly_field.hpp>
#include <opmeans/series.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace opmeans {

// ---------------------------------------------------------------------------
// Kernel means as operator functions of the Laplacian.  A MeanSpec selects
// the kernel, the radius, the operator power (1 forward, -1 inverse,
// fractional in between) and the evaluation route:
//
//   Series   - truncated power series in the Laplacian with exact rational
//              coefficients, rounded to double once on application;
//   Spectral - the exact symbol sigma(r kappa)^power on each Fourier mode
//              (grid and plane-wave fields only).
// ---------------------------------------------------------------------------
enum class EvalMode { Series, Spectral };

struct MeanSpec {
  KernelSpec kernel = KernelSpec::sphere();
  double radius = 1.0;
  double power = 1.0;
  EvalMode mode = EvalMode::Series;
  int order = 8;  // truncation order of the series route

  static MeanSpec forward(KernelSpec k, double r, EvalMode mode = EvalMode::Series) {
    return {k, r, 1.0, mode, 8};
  }
  static MeanSpec inverse(KernelSpec k, double r, EvalMode mode = EvalMode::Series) {
    return {k, r, -1.0, mode, 8};
  }
};

inline void validate(const MeanSpec& spec) {
  if (!(spec.radius > 0.0) || !std::isfinite(spec.radius))
    throw InvalidArgument("MeanSpec: radius must be positive and finite");
  if (!std::isfinite(spec.power)) throw InvalidArgument("MeanSpec: power must be finite");
  if (spec.order < 0) throw InvalidArgument("MeanSpec: order must be >= 0");
}

// Coefficients of the operator as a series in the Laplacian.  radius^2 and
// the power are folded in as exact rationals (doubles are dyadic), so equal
// specs always yield bit-identical coefficients regardless of the route that
// assembled them.
inline RationalSeries operator_series(const MeanSpec& spec, int dim) {
  validate(spec);
  RationalSeries base = mean_series(spec.kernel, dim, spec.order);  // in r^2 Lap
  const Rational m = Rational(spec.power);
  if (m != Rational(1)) base = real_power(base, m);
  const Rational r(spec.radius);
  return base.scaled(r * r);
}

// sigma(r kappa)^power at lambda = -kappa^2.  Fractional powers of negative
// symbol values yield NaN and negative powers at symbol zeros yield +-inf;
// the grid multiplier machinery converts either into MultiplierSingular when
// the offending mode is populated.
inline double operator_symbol(const MeanSpec& spec, int dim, double lambda) {
  const double kappa = std::sqrt(std::max(0.0, -lambda));
  const double sigma = kernel_symbol(spec.kernel, dim, spec.radius * kappa);
  if (spec.power == 1.0) return sigma;
  if (sigma < 0.0 && spec.power != std::floor(spec.power))
    return std::numeric_limits<double>::quiet_NaN();
  return std::pow(sigma, spec.power);
}

// Modes where the forward symbol has collapsed below this threshold make a
// negative power useless in double precision; fail fast instead.
inline constexpr double inverse_symbol_guard = 1e-9;

namespace detail {

inline void require_invertible_on(const GridField& f, const MeanSpec& spec) {
  const auto& coeffs = f.spectrum();
  double maxMag = 0.0;
  for (const auto& c : coeffs) maxMag = std::max(maxMag, std::abs(c));
  const double populated = 1e-13 * maxMag;
  f.for_each_mode([&](size_t flat, double k2, bool) {
    if (std::abs(coeffs[flat]) <= populated) return;
    const double rho = spec.radius * std::sqrt(k2);
    const double sigma = kernel_symbol(spec.kernel, f.dim(), rho);
    if (std::abs(sigma) < inverse_symbol_guard)
      throw MultiplierSingular("mean: negative power at a forward-symbol zero", rho);
  });
}

}  // namespace detail

inline GridField mean(const GridField& f, const MeanSpec& spec) {
  validate(spec);
  if (spec.mode == EvalMode::Series) return apply_series(f, operator_series(spec, f.dim()));
  if (spec.power < 0.0) detail::require_invertible_on(f, spec);
  SpectralMultiplier mult;
  const MeanSpec s = spec;
  const int n = f.dim();
  mult.symbol = [s, n](double lambda) { return operator_symbol(s, n, lambda); };
  return f.apply(mult);
}

inline PolyField mean(const PolyField& f, const MeanSpec& spec) {
  validate(spec);
  if (spec.mode == EvalMode::Spectral)
    throw NonGridSpectral("mean: spectral evaluation needs a grid or plane-wave field");
  if (2 * spec.order < f.total_degree())
    warn("mean: series order " + std::to_string(spec.order) + " truncates a degree-" +
         std::to_string(f.total_degree()) + " polynomial");
  return apply_series(f, operator_series(spec, f.dim()));
}

inline PlaneWaveField mean(const PlaneWaveField& f, const MeanSpec& spec) {
  validate(spec);
  if (spec.mode == EvalMode::Series) return apply_series(f, operator_series(spec, f.dim()));
  const double rho = spec.radius * std::sqrt(f.k_norm_squared());
  if (spec.power < 0.0) {
    const double sigma = kernel_symbol(spec.kernel, f.dim(), rho);
    if (std::abs(sigma) < inverse_symbol_guard)
      throw MultiplierSingular("mean: negative power at a forward-symbol zero", rho);
  }
  const double psi = operator_symbol(spec, f.dim(), f.eigenvalue());
  if (!std::isfinite(psi))
    throw MultiplierSingular("mean: symbol not finite at the plane-wave eigenvalue", rho);
  return f.with_amplitude(f.amplitude() * psi);
}

// The inverse operator is the same spec with the power negated.
template <class Field>
Field invert_mean(const Field& f, MeanSpec spec) {
  spec.power = -spec.power;
  return mean(f, spec);
}

// ---------------------------------------------------------------------------
// Composition of two spherical means of radii r1, r2 in closed form: the
// coefficient of the k-th Laplacian power is
//
//   A_k = 1/(4^k k! (n/2)_k) * sum_{j=0..k} (1-n/2-k)_j (-k)_j
//           / ((n/2)_j j!) * r1^(2(k-j)) r2^(2j)
//
// evaluated exactly in rationals.  Expanding the terminating sum keeps the
// expression polynomial in both radii, so r1 = 0 needs no special case.
// The product of the two individual series must agree coefficient by
// coefficient; the test suite checks that identity exactly.
// ---------------------------------------------------------------------------
inline RationalSeries addition_series(const Rational& r1sq, const Rational& r2sq, int dim,
                                      int order) {
  if (dim < 1) throw InvalidArgument("addition_series: dimension must be >= 1");
  if (order < 0) throw InvalidArgument("addition_series: negative order");
  if (r1sq < 0 || r2sq < 0) throw InvalidArgument("addition_series: negative squared radius");
  const Rational half_n(dim, 2);
  std::vector<Rational> a(static_cast<size_t>(order) + 1);
  Rational outer(1);  // 1 / (4^k k! (n/2)_k), updated per k
  for (int k = 0; k <= order; ++k) {
    if (k > 0) outer /= Rational(4) * Rational(k) * (half_n + Rational(k - 1));
    Rational sum(0);
    for (int j = 0; j <= k; ++j) {
      Rational term = pochhammer(Rational(1) - half_n - Rational(k), j) *
                      pochhammer(Rational(-k), j) /
                      (pochhammer(half_n, j) * pochhammer(Rational(1), j));
      for (int i = 0; i < k - j; ++i) term *= r1sq;
      for (int i = 0; i < j; ++i) term *= r2sq;
      sum += term;
    }
    a[static_cast<size_t>(k)] = outer * sum;
  }
  return RationalSeries(std::move(a));
}

// ---------------------------------------------------------------------------
// Square of the spherical mean (same radius applied twice) in closed form:
// a 1F2 series with argument r^2 Lap -- note, not (r^2/4) Lap.  Defined for
// n >= 2; at n = 1 the lower parameter n-1 hits a pole (coeffs_pfq throws
// PoleParameter) and the closed form genuinely fails: the 1D symbol
// cos^2(rho) = (1 + cos 2 rho)/2 keeps a constant term no 1F2 in rho
// reproduces, so composing two means is the only route there.
// ---------------------------------------------------------------------------
inline RationalSeries double_sphere_mean_series(int dim, double radius, int order) {
  if (dim < 1) throw InvalidArgument("double_sphere_mean_series: dimension must be >= 1");
  if (order < 0) throw InvalidArgument("double_sphere_mean_series: negative order");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidArgument("double_sphere_mean_series: radius must be positive and finite");
  HypergeometricSpec h;
  h.upper = {Rational(dim - 1, 2)};
  h.lower = {Rational(dim, 2), Rational(dim - 1)};
  h.argumentScale = Rational(1);
  const Rational r(radius);
  return coeffs_pfq(h, order).scaled(r * r);
}

// ---------------------------------------------------------------------------
// Residual of the three-kernel identity
//
//   sphere mean - ball mean = (r^2 Lap / (n (n+2))) * bell(1) mean,
//
// a contiguous-parameter relation between the three hypergeometric series.
// The series route assembles the residual in exact rationals, where it
// cancels identically; the spectral route combines three independently
// evaluated means and reports whatever rounding leaves behind.
// ---------------------------------------------------------------------------
inline RationalSeries kernel_identity_residual_series(int dim, double radius, int order) {
  if (dim < 1) throw InvalidArgument("kernel_identity_residual_series: dimension must be >= 1");
  if (order < 0) throw InvalidArgument("kernel_identity_residual_series: negative order");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidArgument("kernel_identity_residual_series: radius must be positive and finite");
  const Rational r(radius);
  const Rational r2 = r * r;
  const RationalSeries sph = mean_series(KernelSpec::sphere(), dim, order).scaled(r2);
  const RationalSeries ball = mean_series(KernelSpec::ball(), dim, order).scaled(r2);
  const RationalSeries bell = mean_series(KernelSpec::bell(1.0), dim, order).scaled(r2);
  const Rational c = r2 / (Rational(dim) * Rational(dim + 2));
  return sph - ball - bell.shifted(1).times(c);
}

inline GridField kernel_identity_residual(const GridField& f, double radius, EvalMode mode,
                                          int order = 12) {
  if (mode == EvalMode::Series)
    return apply_series(f, kernel_identity_residual_series(f.dim(), radius, order));
  const GridField a = mean(f, {KernelSpec::sphere(), radius, 1.0, EvalMode::Spectral, order});
  const GridField b = mean(f, {KernelSpec::ball(), radius, 1.0, EvalMode::Spectral, order});
  const GridField c = mean(f, {KernelSpec::bell(1.0), radius, 1.0, EvalMode::Spectral, order});
  const double w = radius * radius / (f.dim() * (f.dim() + 2.0));
  return a.plus(b, -1.0).plus(c.laplacian(), -w);
}

// ---------------------------------------------------------------------------
// 1D moving average (the ball mean in one dimension): symbol sin(rho)/rho.
// Inversion multiplies by rho/sin(rho), which blows up at rho = pi; the
// inverse therefore demands the whole grid band stays below that zero and
// reports the smallest offending |r k| otherwise, populated or not.
// ---------------------------------------------------------------------------
inline GridField moving_average_1d(const GridField& f, double r) {
  if (f.dim() != 1) throw InvalidArgument("moving_average_1d: field must be one-dimensional");
  if (!(r > 0.0) || !std::isfinite(r))
    throw InvalidArgument("moving_average_1d: radius must be positive and finite");
  SpectralMultiplier mult;
  mult.symbol = [r](double lambda) {
    const double rho = r * std::sqrt(std::max(0.0, -lambda));
    return rho < 1e-12 ? 1.0 : std::sin(rho) / rho;
  };
  return f.apply(mult);
}

inline GridField invert_moving_average_1d(const GridField& f, double r) {
  if (f.dim() != 1)
    throw InvalidArgument("invert_moving_average_1d: field must be one-dimensional");
  if (!(r > 0.0) || !std::isfinite(r))
    throw InvalidArgument("invert_moving_average_1d: radius must be positive and finite");
  const double limit = std::numbers::pi * (1.0 - 1e-12);
  double smallestOffending = std::numeric_limits<double>::infinity();
  for (int m = 0; m < f.shape()[0]; ++m) {
    const double rho = r * std::abs(f.wavenumber(0, m));
    if (rho >= limit) smallestOffending = std::min(smallestOffending, rho);
  }
  if (std::isfinite(smallestOffending))
    throw BandLimitExceeded("invert_moving_average_1d: grid band reaches the symbol zero",
                            smallestOffending);
  SpectralMultiplier mult;
  mult.symbol = [r](double lambda) {
    const double rho = r * std::sqrt(std::max(0.0, -lambda));
    return rho < 1e-12 ? 1.0 : rho / std::sin(rho);
  };
  return f.apply(mult);
}

}  // namespace opmeans
