#pragma once

#include <opmeans/errors.hpp>
#include <opmeans/kernels.hpp>
#include <opmeans/quadrature.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

namespace opmeans {

// ---------------------------------------------------------------------------
// Brute-force quadrature means, deliberately independent of the operator
// implementations: direct averages of field samples over spheres and balls.
//
// Dimension dispatch: n=1 two-point, n=2 angular trapezoid, n=3
// Gauss-Legendre in cos(theta) x uniform longitudes, n>=4 Monte Carlo with
// counter-based per-sample generation (identical results for identical
// seeds, independent of evaluation order).
// ---------------------------------------------------------------------------
struct QuadratureRule {
  int angularPoints = 64;  // n = 2
  int muNodes = 24;        // n = 3
  int phiPoints = 48;      // n = 3
  int mcSamples = 8192;    // n >= 4
  uint64_t seed = 12345;
  int radialNodes = 256;   // kernel radial reduction (Gauss-Legendre)
};

namespace detail {

inline const Quad1D& cached_legendre(int n) {
  static std::map<int, Quad1D> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

// Counter-based uniform stream: every sample index owns an independent,
// thread-agnostic generator state.
struct SplitMix64 {
  uint64_t s;
  explicit SplitMix64(uint64_t seed) : s(seed) {}
  uint64_t next() {
    s += 0x9E3779B97F4A7C15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double next_unit() {  // (0, 1)
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }
};

// Unit direction in n dimensions from normalized Gaussians (Box-Muller on
// the per-sample stream).
inline void unit_direction(uint64_t seed, uint64_t sampleIndex, int n, double* u) {
  SplitMix64 rng(seed ^ (0x632BE59BD9B4E019ull * (sampleIndex + 1)));
  double norm2 = 0.0;
  for (int i = 0; i < n; i += 2) {
    const double u1 = rng.next_unit();
    const double u2 = rng.next_unit();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double a = rad * std::cos(2.0 * std::numbers::pi * u2);
    const double b = rad * std::sin(2.0 * std::numbers::pi * u2);
    u[i] = a;
    if (i + 1 < n) u[i + 1] = b;
  }
  for (int i = 0; i < n; ++i) norm2 += u[i] * u[i];
  const double inv = 1.0 / std::sqrt(norm2);
  for (int i = 0; i < n; ++i) u[i] *= inv;
}

template <class F>
void check_probe(const F& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.dim())
    throw InvalidArgument("oracle: probe point arity mismatch");
  for (double xi : x)
    if (!std::isfinite(xi)) throw OutOfDomain("oracle: non-finite probe point");
}

}  // namespace detail

struct McEstimate {
  double mean = 0.0;
  double standardError = 0.0;
};

// Monte Carlo sphere mean with a standard-error estimate (n >= 2 supported,
// primarily used for n >= 4 where no product rule is provided).
template <class F>
McEstimate monte_carlo_sphere_mean(const F& f, std::span<const double> x, double r,
                                   const QuadratureRule& rule) {
  detail::check_probe(f, x);
  const int n = f.dim();
  const int N = rule.mcSamples;
  if (N < 2) throw InvalidArgument("monte_carlo_sphere_mean: need at least 2 samples");
  std::vector<double> u(static_cast<size_t>(n)), p(static_cast<size_t>(n));
  double sum = 0.0, sumSq = 0.0;
  for (int i = 0; i < N; ++i) {
    detail::unit_direction(rule.seed, static_cast<uint64_t>(i), n, u.data());
    for (int d = 0; d < n; ++d) p[static_cast<size_t>(d)] = x[static_cast<size_t>(d)] + r * u[static_cast<size_t>(d)];
    const double v = f.evaluate(p);
    sum += v;
    sumSq += v * v;
  }
  McEstimate est;
  est.mean = sum / N;
  const double var = std::max(0.0, (sumSq - sum * sum / N) / (N - 1));
  est.standardError = std::sqrt(var / N);
  return est;
}

// Spherical (surface) mean of f at x with radius r.
template <class F>
double sphere_mean_quadrature(const F& f, std::span<const double> x, double r,
                              const QuadratureRule& rule = {}) {
  detail::check_probe(f, x);
  if (!(r >= 0.0) || !std::isfinite(r))
    throw InvalidArgument("sphere_mean_quadrature: radius must be >= 0");
  const int n = f.dim();
  if (n == 1) {
    const double a = f.evaluate(std::vector<double>{x[0] - r});
    const double b = f.evaluate(std::vector<double>{x[0] + r});
    return 0.5 * (a + b);
  }
  if (n == 2) {
    const int N = rule.angularPoints;
    if (N < 4) throw InvalidArgument("sphere_mean_quadrature: angularPoints too small");
    double sum = 0.0;
    std::vector<double> p(2);
    for (int i = 0; i < N; ++i) {
      const double th = 2.0 * std::numbers::pi * i / N;
      p[0] = x[0] + r * std::cos(th);
      p[1] = x[1] + r * std::sin(th);
      sum += f.evaluate(p);
    }
    return sum / N;
  }
  if (n == 3) {
    const Quad1D& gl = detail::cached_legendre(rule.muNodes);
    const int Nphi = rule.phiPoints;
    if (Nphi < 4) throw InvalidArgument("sphere_mean_quadrature: phiPoints too small");
    double num = 0.0, den = 0.0;
    std::vector<double> p(3);
    for (size_t j = 0; j < gl.nodes.size(); ++j) {
      const double mu = gl.nodes[j];
      const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      double ring = 0.0;
      for (int l = 0; l < Nphi; ++l) {
        const double ph = 2.0 * std::numbers::pi * l / Nphi;
        p[0] = x[0] + r * s * std::cos(ph);
        p[1] = x[1] + r * s * std::sin(ph);
        p[2] = x[2] + r * mu;
        ring += f.evaluate(p);
      }
      num += gl.weights[j] * ring;
      den += gl.weights[j] * Nphi;
    }
    return num / den;
  }
  return monte_carlo_sphere_mean(f, x, r, rule).mean;
}

// Kernel-weighted ball mean: C-normalized radial Gauss-Legendre over [0,1]
// of K(u) u^(n-1) times the sphere mean at radius r*u.
template <class F>
double kernel_mean_quadrature(const F& f, std::span<const double> x, double r,
                              const KernelSpec& kernel, const QuadratureRule& rule = {}) {
  if (kernel.family == KernelSpec::Family::Sphere)
    return sphere_mean_quadrature(f, x, r, rule);
  detail::check_probe(f, x);
  const int n = f.dim();
  const Quad1D& gl = detail::cached_legendre(rule.radialNodes);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < gl.nodes.size(); ++i) {
    const double u = 0.5 * (gl.nodes[i] + 1.0);  // map [-1,1] -> [0,1]
    double w = 0.5 * gl.weights[i] * kernel.profile(u);
    for (int p = 0; p < n - 1; ++p) w *= u;
    num += w * sphere_mean_quadrature(f, x, r * u, rule);
    den += w;
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Trapezoid mean of a complex polynomial over the circle z0 + r e^{i theta}.
// Exact (to rounding) once nTheta exceeds the polynomial degree; the
// precondition asks for the usual 2*degree+1 margin.
// ---------------------------------------------------------------------------
inline std::complex<double> complex_circle_mean(std::span<const std::complex<double>> coeffs,
                                                std::complex<double> z0, double r, int nTheta) {
  if (coeffs.empty()) throw InvalidArgument("complex_circle_mean: empty polynomial");
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (nTheta < 2 * degree + 1)
    throw InvalidArgument("complex_circle_mean: nTheta must be >= 2*degree+1");
  std::complex<double> sum(0.0, 0.0);
  for (int i = 0; i < nTheta; ++i) {
    const double th = 2.0 * std::numbers::pi * i / nTheta;
    const std::complex<double> z = z0 + std::polar(r, th);
    std::complex<double> v = coeffs[static_cast<size_t>(degree)];
    for (int j = degree - 1; j >= 0; --j) v = v * z + coeffs[static_cast<size_t>(j)];
    sum += v;
  }
  return sum / static_cast<double>(nTheta);
}

// ---------------------------------------------------------------------------
// Integral inversion of the 1D moving average from its derivatives:
//
//   f(x) = (2 r^2 / pi) Int_0^inf ( |cos(pi u / 2r)| - cos(pi u / 2r) )
//            * ( fbar'''(x-u) + (pi/2r)^2 fbar'(x-u) ) du
//
// The weight vanishes outside u in (r(4m+1), r(4m+3)); panels are aligned to
// those zeros and integrated by composite trapezoid.  The cutoff doubles
// until the tail stabilizes; TailNotConverged if it never does.
// ---------------------------------------------------------------------------
inline double moving_average_integral_inverse(const std::function<double(double)>& fbarD1,
                                              const std::function<double(double)>& fbarD3,
                                              double r, double x, double cutoff,
                                              int pointsPerPanel = 512,
                                              double tailTol = 1e-10) {
  if (!(r > 0.0)) throw InvalidArgument("moving_average_integral_inverse: r must be > 0");
  if (!(cutoff > 0.0)) throw InvalidArgument("moving_average_integral_inverse: bad cutoff");
  if (pointsPerPanel < 8) throw InvalidArgument("moving_average_integral_inverse: too few points");

  const double halfPiOverR = std::numbers::pi / (2.0 * r);
  const double c1 = halfPiOverR * halfPiOverR;
  const auto integrand = [&](double u) {
    const double w = -2.0 * std::cos(halfPiOverR * u);  // = |cos|-cos on the panels
    return w * (fbarD3(x - u) + c1 * fbarD1(x - u));
  };
  const auto integrate_to = [&](double U) {
    double acc = 0.0;
    for (int m = 0;; ++m) {
      const double lo = r * (4.0 * m + 1.0);
      if (lo >= U) break;
      const double hi = r * (4.0 * m + 3.0);
      const double hstep = (hi - lo) / pointsPerPanel;
      double panel = 0.5 * (integrand(lo) + integrand(hi));
      for (int j = 1; j < pointsPerPanel; ++j) panel += integrand(lo + j * hstep);
      acc += panel * hstep;
    }
    return acc;
  };

  double U = cutoff;
  double total = integrate_to(U);
  bool converged = false;
  for (int attempt = 0; attempt < 24; ++attempt) {
    const double wider = integrate_to(2.0 * U);
    if (std::abs(wider - total) <= tailTol * std::max(1.0, std::abs(wider))) {
      total = wider;
      converged = true;
      break;
    }
    total = wider;
    U *= 2.0;
  }
  if (!converged)
    throw TailNotConverged("moving_average_integral_inverse: tail did not stabilize");
  return (2.0 * r * r / std::numbers::pi) * total;
}

}  // namespace opmeans
