#pragma once

#include <opmeans/grid_field.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace opmeans {

// ---------------------------------------------------------------------------
// Test-field builders shared by the test suite and the CLI: band-limited
// trigonometric sums (analytic everywhere, exactly representable on any grid
// resolving their modes) and smooth compact phantoms.
// ---------------------------------------------------------------------------

// A finite sum of cosine waves with integer mode vectors on a periodic box.
// Cheap to evaluate at arbitrary points, which makes it the field of choice
// for quadrature cross-checks against grid operators.
class CosineSum {
 public:
  struct Wave {
    std::vector<double> k;
    double amplitude;
    double phase;
  };

  CosineSum(int dim, std::vector<Wave> waves) : dim_(dim), waves_(std::move(waves)) {
    if (dim_ < 1) throw InvalidArgument("CosineSum: dimension must be >= 1");
    for (const auto& w : waves_)
      if (static_cast<int>(w.k.size()) != dim_)
        throw InvalidArgument("CosineSum: wavevector arity mismatch");
  }

  // Random waves on integer modes with 0 < |m|_inf <= maxMode, distinct
  // modes, amplitudes of order 1/count.  Deterministic per seed.
  static CosineSum random(int dim, double boxLength, int maxMode, int waveCount,
                          uint64_t seed) {
    if (maxMode < 1) throw InvalidArgument("CosineSum::random: maxMode must be >= 1");
    if (waveCount < 1) throw InvalidArgument("CosineSum::random: waveCount must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> mode(-maxMode, maxMode);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::set<std::vector<int>> used;
    std::vector<Wave> waves;
    const double base = 2.0 * std::numbers::pi / boxLength;
    while (static_cast<int>(waves.size()) < waveCount) {
      std::vector<int> m(static_cast<size_t>(dim));
      bool zero = true;
      for (auto& mi : m) {
        mi = mode(rng);
        if (mi != 0) zero = false;
      }
      if (zero || !used.insert(m).second) continue;
      Wave w;
      w.k.resize(static_cast<size_t>(dim));
      for (int a = 0; a < dim; ++a) w.k[static_cast<size_t>(a)] = base * m[static_cast<size_t>(a)];
      w.amplitude = unit(rng) / waveCount;
      w.phase = angle(rng);
      waves.push_back(std::move(w));
    }
    return CosineSum(dim, std::move(waves));
  }

  int dim() const { return dim_; }
  const std::vector<Wave>& waves() const { return waves_; }

  double evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw InvalidArgument("CosineSum::evaluate: point arity mismatch");
    double acc = 0.0;
    for (const auto& w : waves_) {
      double arg = w.phase;
      for (int a = 0; a < dim_; ++a) arg += w.k[static_cast<size_t>(a)] * x[static_cast<size_t>(a)];
      acc += w.amplitude * std::cos(arg);
    }
    return acc;
  }

  // Largest |k| over the waves: the band limit actually in use.
  double max_wavenumber() const {
    double m = 0.0;
    for (const auto& w : waves_) {
      double n2 = 0.0;
      for (double ki : w.k) n2 += ki * ki;
      m = std::max(m, std::sqrt(n2));
    }
    return m;
  }

  GridField sample_to_grid(const std::vector<int>& shape, double boxLength) const {
    if (static_cast<int>(shape.size()) != dim_)
      throw InvalidArgument("CosineSum::sample_to_grid: shape arity mismatch");
    std::vector<double> spacing(shape.size());
    for (size_t a = 0; a < shape.size(); ++a) spacing[a] = boxLength / shape[a];
    return GridField::sample(shape, spacing,
                             [this](std::span<const double> x) { return evaluate(x); });
  }

 private:
  int dim_;
  std::vector<Wave> waves_;
};

// ---------------------------------------------------------------------------
// Difference of two offset Gaussians: smooth, effectively compact, and with
// zero total integral — the standard phantom for the line-transform studies.
// ---------------------------------------------------------------------------
struct GaussianPair {
  std::vector<double> center1;
  std::vector<double> center2;
  double sigma = 0.25;
  double amplitude = 1.0;

  int dim() const { return static_cast<int>(center1.size()); }

  double evaluate(std::span<const double> x) const {
    const double inv = 1.0 / (2.0 * sigma * sigma);
    double r1 = 0.0, r2 = 0.0;
    for (size_t a = 0; a < center1.size(); ++a) {
      const double d1 = x[a] - center1[a];
      const double d2 = x[a] - center2[a];
      r1 += d1 * d1;
      r2 += d2 * d2;
    }
    return amplitude * (std::exp(-r1 * inv) - std::exp(-r2 * inv));
  }

  // Two centers placed symmetrically about the box center along a diagonal.
  static GaussianPair centered(int dim, double boxLength, double sigma, double separation) {
    if (dim < 2 || dim > 3) throw InvalidArgument("GaussianPair::centered: dimension 2 or 3");
    GaussianPair p;
    p.sigma = sigma;
    p.center1.assign(static_cast<size_t>(dim), 0.5 * boxLength);
    p.center2 = p.center1;
    const double offset = 0.5 * separation / std::sqrt(static_cast<double>(dim));
    for (int a = 0; a < dim; ++a) {
      p.center1[static_cast<size_t>(a)] += offset;
      p.center2[static_cast<size_t>(a)] -= offset;
    }
    return p;
  }

  // The same phantom rotated about the box center (first two axes).
  GaussianPair rotated(double angle, double boxLength) const {
    const double c = std::cos(angle), s = std::sin(angle);
    GaussianPair out = *this;
    for (auto* ctr : {&out.center1, &out.center2}) {
      const double x = (*ctr)[0] - 0.5 * boxLength;
      const double y = (*ctr)[1] - 0.5 * boxLength;
      (*ctr)[0] = 0.5 * boxLength + c * x - s * y;
      (*ctr)[1] = 0.5 * boxLength + s * x + c * y;
    }
    return out;
  }

  GridField sample_to_grid(const std::vector<int>& shape, double boxLength) const {
    if (static_cast<int>(shape.size()) != dim())
      throw InvalidArgument("GaussianPair::sample_to_grid: shape arity mismatch");
    std::vector<double> spacing(shape.size());
    for (size_t a = 0; a < shape.size(); ++a) spacing[a] = boxLength / shape[a];
    return GridField::sample(shape, spacing,
                             [this](std::span<const double> x) { return evaluate(x); });
  }
};

// ---------------------------------------------------------------------------
// 1D Gaussian bump exp(-(x-c)^2) with closed forms for its moving average
// and the derivatives the integral inversion needs.
// ---------------------------------------------------------------------------
struct GaussianBump1D {
  double center = 0.0;

  double f(double x) const {
    const double u = x - center;
    return std::exp(-u * u);
  }

  // (1/2r) Int_{x-r}^{x+r} f = sqrt(pi)/(4r) (erf(u+r) - erf(u-r)).
  double moving_average(double x, double r) const {
    const double u = x - center;
    return std::sqrt(std::numbers::pi) / (4.0 * r) * (std::erf(u + r) - std::erf(u - r));
  }

  double moving_average_d1(double x, double r) const {
    const double u = x - center;
    const double a = u + r, b = u - r;
    return (std::exp(-a * a) - std::exp(-b * b)) / (2.0 * r);
  }

  double moving_average_d3(double x, double r) const {
    const double u = x - center;
    const double a = u + r, b = u - r;
    return ((4.0 * a * a - 2.0) * std::exp(-a * a) - (4.0 * b * b - 2.0) * std::exp(-b * b)) /
           (2.0 * r);
  }
};

}  // namespace opmeans
