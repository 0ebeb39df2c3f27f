#pragma once

#include <opmeans/meanops.hpp>

#include <json.hpp>

#include <cmath>
#include <string>

namespace opmeans {

// ---------------------------------------------------------------------------
// As a function of the radius, each kernel mean F(x, r) obeys a singular
// radial wave equation
//
//   d2F/dr2 + (a / r) dF/dr = Lap F,
//
// with a = n-1 for the sphere, n+1 for the ball and 2 alpha + n + 1 for the
// bell family.  The check below discretizes the radial derivatives with
// second-order central differences and reports the residual norm, which
// should shrink like h^2 under step refinement.
// ---------------------------------------------------------------------------
inline double radius_evolution_coefficient(const KernelSpec& kernel, int dim) {
  if (dim < 1) throw InvalidArgument("radius_evolution_coefficient: dimension must be >= 1");
  switch (kernel.family) {
    case KernelSpec::Family::Sphere:
      return static_cast<double>(dim - 1);
    case KernelSpec::Family::Ball:
      return static_cast<double>(dim + 1);
    case KernelSpec::Family::Bell:
      return 2.0 * kernel.alpha + dim + 1;
    case KernelSpec::Family::Triangular:
      throw InvalidArgument(
          "radius_evolution_coefficient: the triangular family satisfies no single-term "
          "equation of this form");
  }
  throw Error("radius_evolution_coefficient: unreachable");
}

struct ResidualReport {
  std::string kernel;
  std::string mode;
  double coefficient = 0.0;
  double radius = 0.0;
  double step = 0.0;
  double residualNorm = 0.0;
};

inline nlohmann::json to_json(const ResidualReport& r) {
  return nlohmann::json{{"equation", "d2F/dr2 + (a/r) dF/dr = Lap F"},
                        {"kernel", r.kernel},
                        {"mode", r.mode},
                        {"coefficient", r.coefficient},
                        {"radius", r.radius},
                        {"step", r.step},
                        {"residual_norm", r.residualNorm}};
}

namespace detail {

inline double field_norm(const GridField& f) { return f.max_abs(); }
inline double field_norm(const PolyField& f) { return f.max_abs_coeff(); }
inline double field_norm(const PlaneWaveField& f) { return std::abs(f.amplitude()); }

}  // namespace detail

template <class Field>
ResidualReport radius_evolution_residual(const Field& f, const KernelSpec& kernel, double r,
                                         double h, EvalMode mode = EvalMode::Series,
                                         int order = 12) {
  if (!(h > 0.0) || !(r >= 10.0 * h))
    throw InvalidArgument(
        "radius_evolution_residual: need 0 < h <= r/10 (singular coefficient at r = 0)");
  const double a = radius_evolution_coefficient(kernel, f.dim());
  const auto at = [&](double rr) { return mean(f, MeanSpec{kernel, rr, 1.0, mode, order}); };
  const Field fm = at(r - h);
  const Field f0 = at(r);
  const Field fp = at(r + h);
  const Field lap = f0.laplacian();
  // The differences are formed before any coefficient touches them, so an
  // r-independent mean (harmonic input) cancels exactly, term by term.
  const Field second = fp.plus(f0, -2.0).plus(fm, 1.0).scaled(1.0 / (h * h));
  const Field first = fp.plus(fm, -1.0).scaled(a / (2.0 * r * h));
  const Field res = second.plus(first).plus(lap, -1.0);

  ResidualReport report;
  report.kernel = kernel.name();
  report.mode = (mode == EvalMode::Series) ? "series" : "spectral";
  report.coefficient = a;
  report.radius = r;
  report.step = h;
  report.residualNorm = detail::field_norm(res);
  return report;
}

// Residual-norm ratio between steps h and h/2; second-order differences give
// ratios near 4 once h is inside the asymptotic regime.
template <class Field>
double radius_evolution_convergence_ratio(const Field& f, const KernelSpec& kernel, double r,
                                          double h, EvalMode mode = EvalMode::Series,
                                          int order = 12) {
  const double coarse = radius_evolution_residual(f, kernel, r, h, mode, order).residualNorm;
  const double fine = radius_evolution_residual(f, kernel, r, 0.5 * h, mode, order).residualNorm;
  return coarse / fine;
}

}  // namespace opmeans
