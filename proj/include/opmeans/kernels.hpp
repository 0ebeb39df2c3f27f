#pragma once

#include <opmeans/errors.hpp>
#include <opmeans/quadrature.hpp>
#include <opmeans/series.hpp>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

namespace opmeans {

// ---------------------------------------------------------------------------
// Averaging kernel families on the unit ball (radius scaled by r at use):
//   Sphere          surface measure (the plain spherical mean)
//   Ball            K(u) = 1
//   Bell(alpha)     K(u) = (1 - |u|^2)^alpha
//   Triangular(alpha) K(u) = (1 - |u|)^alpha
// Each has an operator series in r^2*Lap and a spectral symbol sigma(r*kappa).
// ---------------------------------------------------------------------------
struct KernelSpec {
  enum class Family { Sphere, Ball, Bell, Triangular };

  Family family = Family::Sphere;
  double alpha = 0.0;

  static KernelSpec sphere() { return {Family::Sphere, 0.0}; }
  static KernelSpec ball() { return {Family::Ball, 0.0}; }
  static KernelSpec bell(double alpha) {
    require_alpha(alpha);
    return {Family::Bell, alpha};
  }
  static KernelSpec triangular(double alpha) {
    require_alpha(alpha);
    return {Family::Triangular, alpha};
  }

  bool has_alpha() const { return family == Family::Bell || family == Family::Triangular; }

  std::string name() const {
    switch (family) {
      case Family::Sphere: return "sphere";
      case Family::Ball: return "ball";
      case Family::Bell: return "bell(" + std::to_string(alpha) + ")";
      case Family::Triangular: return "tri(" + std::to_string(alpha) + ")";
    }
    return "?";
  }

  // Kernel profile K(u) on [0,1] (volume kernels only).
  double profile(double u) const {
    switch (family) {
      case Family::Ball: return 1.0;
      case Family::Bell: return std::pow(1.0 - u * u, alpha);
      case Family::Triangular: return std::pow(1.0 - u, alpha);
      case Family::Sphere: break;
    }
    throw InvalidArgument("KernelSpec::profile: sphere kernel has no radial profile");
  }

 private:
  static void require_alpha(double alpha) {
    if (!(alpha > -1.0) || !std::isfinite(alpha))
      throw InvalidArgument("KernelSpec: alpha must be finite and > -1");
  }
};

inline KernelSpec kernel_from_name(const std::string& name, double alpha) {
  if (name == "sphere") return KernelSpec::sphere();
  if (name == "ball") return KernelSpec::ball();
  if (name == "bell") return KernelSpec::bell(alpha);
  if (name == "tri") return KernelSpec::triangular(alpha);
  throw InvalidArgument("unknown kernel '" + name + "' (expected sphere|ball|bell|tri)");
}

// ---------------------------------------------------------------------------
// Operator series: the mean at radius r acts as S(r^2 * Lap) where S is the
// unit-radius series returned here (argument scale 1/4 folded in, exact).
// ---------------------------------------------------------------------------
inline RationalSeries mean_series(const KernelSpec& kernel, int dim, int order) {
  if (dim < 1) throw InvalidArgument("mean_series: dimension must be >= 1");
  const Rational half_n(dim, 2);
  const Rational a = Rational(kernel.alpha);  // exact: doubles are dyadic
  HypergeometricSpec spec;
  spec.argumentScale = Rational(1, 4);
  switch (kernel.family) {
    case KernelSpec::Family::Sphere:
      spec.lower = {half_n};
      break;
    case KernelSpec::Family::Ball:
      spec.lower = {half_n + 1};
      break;
    case KernelSpec::Family::Bell:
      spec.lower = {half_n + a + 1};
      break;
    case KernelSpec::Family::Triangular:
      spec.upper = {Rational(dim + 1, 2)};
      spec.lower = {(Rational(dim) + a + 1) / 2, (Rational(dim) + a) / 2 + 1};
      break;
  }
  return coeffs_pfq(spec, order);
}

namespace detail {
double kernel_norm_ratio_quadrature(const KernelSpec& kernel, int dim);
}

// C_K / S_{n-1} = int_0^1 u^(n-1) K(u) du, closed form (volume kernels).
// Each (kernel, dim) pair is cross-checked against numeric quadrature the
// first time it is used.
inline double kernel_norm_ratio(const KernelSpec& kernel, int dim) {
  double closed;
  switch (kernel.family) {
    case KernelSpec::Family::Ball:
      closed = 1.0 / dim;
      break;
    case KernelSpec::Family::Bell:
      closed = 0.5 * std::beta(0.5 * dim, kernel.alpha + 1.0);
      break;
    case KernelSpec::Family::Triangular:
      closed = std::beta(static_cast<double>(dim), kernel.alpha + 1.0);
      break;
    case KernelSpec::Family::Sphere:
      throw InvalidArgument("kernel_norm_ratio: sphere kernel is a surface measure");
  }
  static std::map<std::tuple<int, int, double>, bool> validated;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(static_cast<int>(kernel.family), dim, kernel.alpha);
  if (!validated.count(key)) {
    const double numeric = detail::kernel_norm_ratio_quadrature(kernel, dim);
    if (std::abs(numeric - closed) > 1e-10 * std::abs(closed))
      throw Error("kernel_norm_ratio: closed form disagrees with quadrature for " +
                  kernel.name());
    validated[key] = true;
  }
  return closed;
}

namespace detail {

// 0F1(; b; -rho^2/4) by direct series with compensated summation.  Safe for
// moderate rho (cancellation grows like e^rho); the symbol evaluator switches
// to the Bessel closed form beyond the crossover.
inline double hypergeom0f1_neg(double b, double rho) {
  const double x = 0.25 * rho * rho;
  double sum = 1.0, comp = 0.0, term = 1.0;
  for (int j = 0; j < 400; ++j) {
    term *= -x / ((b + j) * (j + 1));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1.0)) return sum;
  }
  throw Error("hypergeom0f1_neg: series did not converge");
}

// 0F1(; b; -rho^2/4) = Gamma(b) (2/rho)^(b-1) J_{b-1}(rho)
inline double hypergeom0f1_neg_bessel(double b, double rho) {
  return std::tgamma(b) * std::pow(2.0 / rho, b - 1.0) *
         boost::math::cyl_bessel_j(b - 1.0, rho);
}

inline double hypergeom0f1_neg_auto(double b, double rho) {
  return (rho <= 2.0) ? hypergeom0f1_neg(b, rho) : hypergeom0f1_neg_bessel(b, rho);
}

// Numeric counterpart of kernel_norm_ratio: the kernel's own profile under a
// rule whose weight absorbs any endpoint singularity.
inline double kernel_norm_ratio_quadrature(const KernelSpec& kernel, int dim) {
  // Put the (1-u)^alpha endpoint factor into the rule's weight so the
  // remaining integrand is smooth: (1-u^2)^alpha = (1-u)^alpha (1+u)^alpha.
  const double a = (kernel.family == KernelSpec::Family::Ball) ? 0.0 : kernel.alpha;
  const Quad1D q = gauss_jacobi_01(96, a, static_cast<double>(dim - 1));
  double s = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    const double u = q.nodes[i];
    double val = 1.0;
    if (kernel.family == KernelSpec::Family::Bell) val = std::pow(1.0 + u, kernel.alpha);
    s += q.weights[i] * val;
  }
  return s;
}

// Cached Gauss-Jacobi rules for the Triangular radial reduction.
inline const Quad1D& triangular_radial_rule(int dim, double alpha, int nodes) {
  static std::map<std::tuple<int, double, int>, Quad1D> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(dim, alpha, nodes);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, gauss_jacobi_01(nodes, alpha, static_cast<double>(dim - 1))).first;
  return it->second;
}

}  // namespace detail

// Spectral symbol sigma(rho) of the spherical mean, rho = r*kappa.  Closed
// forms for n = 1, 2, 3; the general-n Bessel form otherwise.
inline double sphere_symbol(int dim, double rho) {
  const double arho = std::abs(rho);
  if (arho < 1e-8) return detail::hypergeom0f1_neg(0.5 * dim, arho);
  switch (dim) {
    case 1: return std::cos(arho);
    case 2: return boost::math::cyl_bessel_j(0.0, arho);
    case 3: return std::sin(arho) / arho;
    default: return detail::hypergeom0f1_neg_auto(0.5 * dim, arho);
  }
}

// Spectral symbol of the kernel mean.  The Triangular family has no closed
// form here; its symbol integrates the radial reduction of the sphere symbol
// with a Gauss-Jacobi rule absorbing the (1-u)^alpha u^(n-1) weight.
inline double kernel_symbol(const KernelSpec& kernel, int dim, double rho, int radialNodes = 0) {
  const double arho = std::abs(rho);
  switch (kernel.family) {
    case KernelSpec::Family::Sphere:
      return sphere_symbol(dim, arho);
    case KernelSpec::Family::Ball:
      return detail::hypergeom0f1_neg_auto(0.5 * dim + 1.0, arho);
    case KernelSpec::Family::Bell:
      return detail::hypergeom0f1_neg_auto(0.5 * dim + kernel.alpha + 1.0, arho);
    case KernelSpec::Family::Triangular: {
      const int n = (radialNodes > 0) ? radialNodes
                                      : std::max(64, static_cast<int>(arho / 2.0) + 32);
      const Quad1D& q = detail::triangular_radial_rule(dim, kernel.alpha, n);
      double num = 0.0, den = 0.0;
      for (size_t i = 0; i < q.nodes.size(); ++i) {
        num += q.weights[i] * sphere_symbol(dim, q.nodes[i] * arho);
        den += q.weights[i];
      }
      return num / den;  // constants divide out: exact 1 at rho = 0
    }
  }
  throw Error("kernel_symbol: unreachable");
}

}  // namespace opmeans
