#pragma once

#include <opmeans/grid_field.hpp>
#include <opmeans/parallel.hpp>
#include <opmeans/quadrature.hpp>
#include <opmeans/rational.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace opmeans {

// ---------------------------------------------------------------------------
// Line integrals of compactly supported fields, their average over
// directions, and the inversion of that average through the sqrt(-Lap)
// multiplier.  Supported grid dimensions: 2 and 3 (in 1D a line integral
// does not depend on the point, so the average carries no information).
// ---------------------------------------------------------------------------

struct LineSpec {
  std::vector<double> basePoint;
  std::vector<double> direction;  // unit vector
  double lmin = 0.0;              // integration window along the line
  double lmax = 0.0;
  double step = 0.0;
};

inline void validate(const LineSpec& line, int dim) {
  if (static_cast<int>(line.basePoint.size()) != dim ||
      static_cast<int>(line.direction.size()) != dim)
    throw InvalidArgument("LineSpec: point/direction arity mismatch");
  double norm2 = 0.0;
  for (double d : line.direction) {
    if (!std::isfinite(d)) throw InvalidArgument("LineSpec: non-finite direction");
    norm2 += d * d;
  }
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
    throw InvalidArgument("LineSpec: direction must be a unit vector");
  for (double b : line.basePoint)
    if (!std::isfinite(b)) throw InvalidArgument("LineSpec: non-finite base point");
  if (!(line.lmin < line.lmax)) throw InvalidArgument("LineSpec: need lmin < lmax");
  if (!(line.step > 0.0) || !std::isfinite(line.step))
    throw InvalidArgument("LineSpec: step must be positive and finite");
}

namespace detail {

// Composite trapezoid of sampled values with spacing h, summed with Kahan
// compensation so the result is stable against traversal direction.
inline double trapezoid(const std::vector<double>& v, double h) {
  double sum = 0.0, comp = 0.0;
  for (size_t j = 0; j < v.size(); ++j) {
    const double w = (j == 0 || j + 1 == v.size()) ? 0.5 : 1.0;
    const double y = w * v[j] - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum * h;
}

inline void require_support_inside(double first, double last, double scale,
                                   const char* who) {
  const double tol = 1e-12 * scale;
  if (std::abs(first) > tol || std::abs(last) > tol)
    throw SupportClipped(std::string(who) + ": field support reaches the integration window "
                                            "edge; widen [lmin, lmax]");
}

}  // namespace detail

// Line integral of a grid field: composite trapezoid over [lmin, lmax] with
// samples from the trigonometric interpolant.  The window must cover the
// support along the line; the endpoint samples act as the sentinel.
inline double xray_forward(const GridField& f, const LineSpec& line) {
  validate(line, f.dim());
  const double span = line.lmax - line.lmin;
  const int panels = std::max(1, static_cast<int>(std::lround(span / line.step)));
  const double h = span / panels;
  const std::vector<double> v =
      f.sample_line(line.basePoint, line.direction, line.lmin, h, panels + 1);
  detail::require_support_inside(v.front(), v.back(), f.max_abs(), "xray_forward");
  return detail::trapezoid(v, h);
}

// Same transform for an arbitrary evaluator (analytic phantoms, polynomials
// under a window).  supportScale calibrates the endpoint sentinel.
template <class F>
double xray_forward(const F& fn, const LineSpec& line, int dim, double supportScale) {
  validate(line, dim);
  const double span = line.lmax - line.lmin;
  const int panels = std::max(1, static_cast<int>(std::lround(span / line.step)));
  const double h = span / panels;
  std::vector<double> v(static_cast<size_t>(panels) + 1);
  std::vector<double> p(static_cast<size_t>(dim));
  for (int j = 0; j <= panels; ++j) {
    const double l = line.lmin + j * h;
    for (int a = 0; a < dim; ++a)
      p[static_cast<size_t>(a)] =
          line.basePoint[static_cast<size_t>(a)] + l * line.direction[static_cast<size_t>(a)];
    v[static_cast<size_t>(j)] = fn(p);
  }
  detail::require_support_inside(v.front(), v.back(), supportScale, "xray_forward");
  return detail::trapezoid(v, h);
}

// ---------------------------------------------------------------------------
// Direction sets: unit vectors with weights summing to 1.
// ---------------------------------------------------------------------------
struct DirectionSet {
  int dim = 0;
  std::vector<std::vector<double>> directions;
  std::vector<double> weights;

  // Uniform angles on [0, pi): line integrals are even under direction flip,
  // so the half circle with uniform weights equals the full circular average.
  static DirectionSet half_circle(int count) {
    if (count < 1) throw InvalidArgument("DirectionSet::half_circle: count must be >= 1");
    DirectionSet set;
    set.dim = 2;
    set.directions.reserve(static_cast<size_t>(count));
    set.weights.assign(static_cast<size_t>(count), 1.0 / count);
    for (int i = 0; i < count; ++i) {
      const double phi = std::numbers::pi * i / count;
      set.directions.push_back({std::cos(phi), std::sin(phi)});
    }
    return set;
  }

  // Product rule on the upper hemisphere: Gauss-Legendre in mu = cos(theta)
  // over [0, 1] times uniform longitudes, weights normalized to sum 1.
  static DirectionSet hemisphere(int muNodes, int phiCount);

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  double angle(size_t i) const {  // n = 2 only, for sinogram labeling
    return std::atan2(directions[i][1], directions[i][0]);
  }
};

inline void validate(const DirectionSet& set) {
  if (set.dim < 2 || set.dim > 3)
    throw InvalidArgument("DirectionSet: dimension must be 2 or 3");
  if (set.directions.empty() || set.directions.size() != set.weights.size())
    throw InvalidArgument("DirectionSet: directions/weights size mismatch");
  for (const auto& d : set.directions) {
    if (static_cast<int>(d.size()) != set.dim)
      throw InvalidArgument("DirectionSet: direction arity mismatch");
    double n2 = 0.0;
    for (double c : d) n2 += c * c;
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
      throw InvalidArgument("DirectionSet: directions must be unit vectors");
  }
  if (std::abs(set.weight_sum() - 1.0) > 1e-10)
    throw InvalidArgument("DirectionSet: weights must sum to 1");
}

// ---------------------------------------------------------------------------
// Sinogram (n = 2): line integrals tabulated per direction over a uniform
// offset grid perpendicular to each direction, anchored at the box center.
// ---------------------------------------------------------------------------
struct Sinogram {
  std::vector<double> angles;  // one per direction, radians in [0, pi)
  double offsetStart = 0.0;
  double offsetStep = 0.0;
  int offsetCount = 0;
  std::vector<double> values;  // row-major: [direction][offset]

  double at(size_t dir, int j) const {
    return values[dir * static_cast<size_t>(offsetCount) + static_cast<size_t>(j)];
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << "theta,offset,value\n";
    for (size_t d = 0; d < angles.size(); ++d)
      for (int j = 0; j < offsetCount; ++j)
        out << angles[d] << ',' << offsetStart + j * offsetStep << ',' << at(d, j) << '\n';
    return out.str();
  }
};

namespace detail {

// Largest distance from the box center to a sample above the support
// threshold; the sinogram only needs offsets within this radius.
inline double support_radius(const GridField& f, const std::vector<double>& center) {
  const double cut = 1e-12 * f.max_abs();
  double r2max = 0.0;
  const auto& shape = f.shape();
  const auto& spacing = f.spacing();
  const auto& data = f.data();
  std::vector<int> idx(shape.size(), 0);
  for (size_t flat = 0; flat < data.size(); ++flat) {
    if (std::abs(data[flat]) > cut) {
      double r2 = 0.0;
      for (size_t a = 0; a < shape.size(); ++a) {
        const double d = idx[a] * spacing[a] - center[a];
        r2 += d * d;
      }
      r2max = std::max(r2max, r2);
    }
    for (size_t a = shape.size(); a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return std::sqrt(r2max);
}

inline double catmull_rom(double p0, double p1, double p2, double p3, double t) {
  const double t2 = t * t, t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

// Cubic interpolation in a uniformly tabulated row; outside the table the
// row represents line integrals past the support, i.e. zero.
inline double interp_row(const double* row, int count, double start, double step, double s) {
  const double u = (s - start) / step;
  const int i1 = static_cast<int>(std::floor(u));
  if (i1 < 1 || i1 + 2 >= count) return 0.0;
  return catmull_rom(row[i1 - 1], row[i1], row[i1 + 1], row[i1 + 2], u - i1);
}

}  // namespace detail

// Tabulates line integrals of f for every direction in the set over a
// uniform offset grid (spacing = the finest grid spacing).  Lines run the
// full support diameter, so compact phantoms suffer no window truncation.
inline Sinogram make_sinogram(const GridField& f, const DirectionSet& dirs, double lineStep) {
  validate(dirs);
  if (f.dim() != 2 || dirs.dim != 2)
    throw InvalidArgument("make_sinogram: two-dimensional fields only");
  if (!(lineStep > 0.0) || !std::isfinite(lineStep))
    throw InvalidArgument("make_sinogram: lineStep must be positive and finite");

  const std::vector<double> center = {0.5 * f.axis_length(0), 0.5 * f.axis_length(1)};
  const double ds = std::min(f.spacing()[0], f.spacing()[1]);
  const double radius = detail::support_radius(f, center) + 2.0 * lineStep;
  const double halfSpan = radius + 2.0 * ds;
  const int halfCount = static_cast<int>(std::ceil(halfSpan / ds)) + 2;

  Sinogram sino;
  sino.offsetStep = ds;
  sino.offsetStart = -halfCount * ds;
  sino.offsetCount = 2 * halfCount + 1;
  sino.angles.resize(dirs.directions.size());
  sino.values.assign(dirs.directions.size() * static_cast<size_t>(sino.offsetCount), 0.0);

  const int lineSamples = std::max(2, static_cast<int>(std::ceil(2.0 * radius / lineStep)));
  const double h = 2.0 * radius / lineSamples;

  parallel_for(dirs.directions.size(), [&](size_t d) {
    const auto& th = dirs.directions[d];
    const double perp[2] = {-th[1], th[0]};
    sino.angles[d] = std::atan2(th[1], th[0]);
    std::vector<double> line(static_cast<size_t>(lineSamples) + 1);
    double point[2];
    for (int j = 0; j < sino.offsetCount; ++j) {
      const double s = sino.offsetStart + j * sino.offsetStep;
      double acc = 0.0, comp = 0.0;
      for (int m = 0; m <= lineSamples; ++m) {
        const double l = -radius + m * h;
        point[0] = center[0] + s * perp[0] + l * th[0];
        point[1] = center[1] + s * perp[1] + l * th[1];
        const double w = (m == 0 || m == lineSamples) ? 0.5 : 1.0;
        const double y = w * f.evaluate_cubic(point) - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
      }
      sino.values[d * static_cast<size_t>(sino.offsetCount) + static_cast<size_t>(j)] = acc * h;
    }
  });
  return sino;
}

// ---------------------------------------------------------------------------
// Average of the line transform over directions, evaluated at every grid
// point.  A line integral depends on the line only, so the value at x is the
// tabulated integral at offset (x - center) . perp(theta), read back with
// cubic interpolation; the direction sum runs in fixed index order.
// ---------------------------------------------------------------------------
inline GridField direction_average(const GridField& f, const DirectionSet& dirs,
                                   double lineStep) {
  if (f.dim() == 2) {
    const Sinogram sino = make_sinogram(f, dirs, lineStep);
    const std::vector<double> center = {0.5 * f.axis_length(0), 0.5 * f.axis_length(1)};
    const auto& shape = f.shape();
    const auto& spacing = f.spacing();
    const size_t nd = dirs.directions.size();
    std::vector<double> perp(2 * nd);
    for (size_t d = 0; d < nd; ++d) {
      perp[2 * d] = -dirs.directions[d][1];
      perp[2 * d + 1] = dirs.directions[d][0];
    }
    const double wsum = dirs.weight_sum();
    std::vector<double> out(f.size(), 0.0);
    parallel_for(static_cast<size_t>(shape[0]), [&](size_t row) {
      const double x0 = row * spacing[0] - center[0];
      for (int col = 0; col < shape[1]; ++col) {
        const double x1 = col * spacing[1] - center[1];
        double acc = 0.0;
        for (size_t d = 0; d < nd; ++d) {
          const double s = x0 * perp[2 * d] + x1 * perp[2 * d + 1];
          acc += dirs.weights[d] *
                 detail::interp_row(sino.values.data() + d * static_cast<size_t>(sino.offsetCount),
                                    sino.offsetCount, sino.offsetStart, sino.offsetStep, s);
        }
        out[row * static_cast<size_t>(shape[1]) + static_cast<size_t>(col)] = acc / wsum;
      }
    });
    return GridField(shape, spacing, std::move(out));
  }
  if (f.dim() == 3) {
    validate(dirs);
    if (dirs.dim != 3) throw InvalidArgument("direction_average: direction set dimension mismatch");
    if (!(lineStep > 0.0) || !std::isfinite(lineStep))
      throw InvalidArgument("direction_average: lineStep must be positive and finite");
    const std::vector<double> center = {0.5 * f.axis_length(0), 0.5 * f.axis_length(1),
                                        0.5 * f.axis_length(2)};
    const double ds = std::min({f.spacing()[0], f.spacing()[1], f.spacing()[2]});
    const double radius = detail::support_radius(f, center) + 2.0 * lineStep;
    const double halfSpan = radius + 2.0 * ds;
    const int halfCount = static_cast<int>(std::ceil(halfSpan / ds)) + 2;
    const int tab = 2 * halfCount + 1;
    const double start = -halfCount * ds;
    const int lineSamples = std::max(2, static_cast<int>(std::ceil(2.0 * radius / lineStep)));
    const double h = 2.0 * radius / lineSamples;
    const size_t nd = dirs.directions.size();

    // Per-direction orthonormal frame (e1, e2) spanning the offset plane.
    std::vector<double> frames(6 * nd);
    for (size_t d = 0; d < nd; ++d) {
      const auto& th = dirs.directions[d];
      double e1[3];
      if (std::abs(th[2]) < 0.9) {
        e1[0] = th[1];
        e1[1] = -th[0];
        e1[2] = 0.0;
      } else {
        e1[0] = 0.0;
        e1[1] = th[2];
        e1[2] = -th[1];
      }
      const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
      for (int a = 0; a < 3; ++a) frames[6 * d + static_cast<size_t>(a)] = e1[a] / n1;
      // e2 = theta x e1
      frames[6 * d + 3] = th[1] * frames[6 * d + 2] - th[2] * frames[6 * d + 1];
      frames[6 * d + 4] = th[2] * frames[6 * d + 0] - th[0] * frames[6 * d + 2];
      frames[6 * d + 5] = th[0] * frames[6 * d + 1] - th[1] * frames[6 * d + 0];
    }

    // Tabulate line integrals over the (s1, s2) offset plane per direction.
    std::vector<double> table(nd * static_cast<size_t>(tab) * static_cast<size_t>(tab), 0.0);
    parallel_for(nd, [&](size_t d) {
      const auto& th = dirs.directions[d];
      const double* e1 = &frames[6 * d];
      const double* e2 = &frames[6 * d + 3];
      double point[3];
      for (int j1 = 0; j1 < tab; ++j1) {
        const double s1 = start + j1 * ds;
        for (int j2 = 0; j2 < tab; ++j2) {
          const double s2 = start + j2 * ds;
          if (s1 * s1 + s2 * s2 > halfSpan * halfSpan) continue;  // past support: zero
          double acc = 0.0, comp = 0.0;
          for (int m = 0; m <= lineSamples; ++m) {
            const double l = -radius + m * h;
            for (int a = 0; a < 3; ++a)
              point[a] = center[static_cast<size_t>(a)] + s1 * e1[a] + s2 * e2[a] + l * th[a];
            const double w = (m == 0 || m == lineSamples) ? 0.5 : 1.0;
            const double y = w * f.evaluate_cubic(point) - comp;
            const double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
          }
          table[(d * static_cast<size_t>(tab) + static_cast<size_t>(j1)) * static_cast<size_t>(tab) +
                static_cast<size_t>(j2)] = acc * h;
        }
      }
    });

    const auto& shape = f.shape();
    const auto& spacing = f.spacing();
    const double wsum = dirs.weight_sum();
    std::vector<double> out(f.size(), 0.0);
    parallel_for(static_cast<size_t>(shape[0]), [&](size_t i0) {
      double x[3];
      x[0] = i0 * spacing[0] - center[0];
      for (int i1 = 0; i1 < shape[1]; ++i1) {
        x[1] = i1 * spacing[1] - center[1];
        for (int i2 = 0; i2 < shape[2]; ++i2) {
          x[2] = i2 * spacing[2] - center[2];
          double acc = 0.0;
          for (size_t d = 0; d < nd; ++d) {
            const double* e1 = &frames[6 * d];
            const double* e2 = &frames[6 * d + 3];
            const double s1 = x[0] * e1[0] + x[1] * e1[1] + x[2] * e1[2];
            const double s2 = x[0] * e2[0] + x[1] * e2[1] + x[2] * e2[2];
            const double u = (s1 - start) / ds;
            const int c1 = static_cast<int>(std::floor(u));
            if (c1 < 1 || c1 + 2 >= tab) continue;
            const double* base = table.data() + d * static_cast<size_t>(tab) * static_cast<size_t>(tab);
            double rows[4];
            for (int q = 0; q < 4; ++q)
              rows[q] = detail::interp_row(base + static_cast<size_t>(c1 - 1 + q) * static_cast<size_t>(tab),
                                           tab, start, ds, s2);
            acc += dirs.weights[d] * detail::catmull_rom(rows[0], rows[1], rows[2], rows[3], u - c1);
          }
          out[(i0 * static_cast<size_t>(shape[1]) + static_cast<size_t>(i1)) *
                  static_cast<size_t>(shape[2]) +
              static_cast<size_t>(i2)] = acc / wsum;
        }
      }
    });
    return GridField(shape, spacing, std::move(out));
  }
  throw InvalidArgument("direction_average: grid dimension must be 2 or 3");
}

// ---------------------------------------------------------------------------
// Exact constants: the direction average has Fourier symbol C_n / |k| with
// C_n = Gamma(n/2) sqrt(4 pi) / Gamma((n-1)/2), and the inversion multiplies
// by c_n |k| with c_n = 1/C_n.  Both are rational multiples of a power of
// sqrt(pi); keeping them in that form makes the reciprocity product equal 1
// identically rather than to rounding.
// ---------------------------------------------------------------------------
struct PiRational {
  Rational factor{1};
  int sqrtPiPower = 0;

  double value() const {
    return to_double(factor) * std::pow(std::numbers::pi, 0.5 * sqrtPiPower);
  }
  PiRational operator*(const PiRational& o) const {
    return {factor * o.factor, sqrtPiPower + o.sqrtPiPower};
  }
  PiRational operator/(const PiRational& o) const {
    if (o.factor == 0) throw InvalidArgument("PiRational: division by zero");
    return {factor / o.factor, sqrtPiPower - o.sqrtPiPower};
  }
  bool operator==(const PiRational& o) const {
    return factor == o.factor && sqrtPiPower == o.sqrtPiPower;
  }
  bool is_one() const { return factor == 1 && sqrtPiPower == 0; }
};

// Gamma(twiceArg / 2) for twiceArg >= 1: integer arguments give factorials,
// half-integer arguments give (2m)!/(4^m m!) sqrt(pi).
inline PiRational gamma_half(int twiceArg) {
  if (twiceArg < 1) throw InvalidArgument("gamma_half: argument must be >= 1/2");
  if (twiceArg % 2 == 0) {
    BigInt f = 1;
    for (int i = 2; i < twiceArg / 2; ++i) f *= i;
    return {Rational(f), 0};
  }
  const int m = (twiceArg - 1) / 2;
  BigInt num = 1, den = 1;
  for (int i = 1; i <= 2 * m; ++i) num *= i;
  for (int i = 1; i <= m; ++i) den *= 4 * i;
  return {Rational(num, den), 1};
}

inline PiRational direction_average_constant(int dim) {
  if (dim < 2) throw InvalidArgument("direction_average_constant: dimension must be >= 2");
  const PiRational sqrt4pi{Rational(2), 1};
  return gamma_half(dim) * sqrt4pi / gamma_half(dim - 1);
}

inline PiRational riesz_constant(int dim) {
  if (dim < 2) throw InvalidArgument("riesz_constant: dimension must be >= 2");
  const PiRational sqrt4pi{Rational(2), 1};
  return gamma_half(dim - 1) / (sqrt4pi * gamma_half(dim));
}

// ---------------------------------------------------------------------------
// Inversion of the direction average: multiply by c_n sqrt(-lambda).  The
// symbol annihilates constants, so the caller declares what the output mean
// should be.
// ---------------------------------------------------------------------------
enum class DcHandling { ZeroMean, ProvidedMean };

inline const char* to_string(DcHandling dc) {
  return dc == DcHandling::ZeroMean ? "zero_mean" : "provided_mean";
}

inline GridField riesz_inverse(const GridField& avg, DcHandling dc = DcHandling::ZeroMean,
                               double providedMean = 0.0) {
  if (avg.dim() < 2)
    throw InvalidArgument("riesz_inverse: grid dimension must be >= 2");
  const double c = riesz_constant(avg.dim()).value();
  SpectralMultiplier mult;
  mult.symbol = [c](double lambda) { return c * std::sqrt(std::max(0.0, -lambda)); };
  mult.dc = (dc == DcHandling::ZeroMean) ? SpectralMultiplier::Dc::ZeroMean
                                         : SpectralMultiplier::Dc::ProvidedMean;
  mult.dcMean = providedMean;
  return avg.apply(mult);
}

// ---------------------------------------------------------------------------
// Zero-padding helpers.  The direction average of a compactly supported
// field carries algebraic tails (a dipole falls off like 1/R^2 in 2D), so it
// is not periodic on the phantom's own box; the sqrt(-Lap) multiplier would
// amplify the wrap-around seam.  Embedding the phantom at the center of an
// enlarged box pushes the seam away, and cropping afterwards discards it.
// ---------------------------------------------------------------------------
inline GridField zero_pad_centered(const GridField& f, int factor) {
  if (factor < 1) throw InvalidArgument("zero_pad_centered: factor must be >= 1");
  if (factor == 1) return f;
  const auto& shape = f.shape();
  std::vector<int> bigShape(shape.size()), offset(shape.size());
  size_t total = 1;
  for (size_t a = 0; a < shape.size(); ++a) {
    bigShape[a] = factor * shape[a];
    offset[a] = ((factor - 1) * shape[a]) / 2;
    total *= static_cast<size_t>(bigShape[a]);
  }
  std::vector<double> data(total, 0.0);
  const auto& src = f.data();
  std::vector<int> idx(shape.size(), 0);
  for (size_t flat = 0; flat < src.size(); ++flat) {
    size_t big = 0;
    for (size_t a = 0; a < shape.size(); ++a)
      big = big * static_cast<size_t>(bigShape[a]) + static_cast<size_t>(idx[a] + offset[a]);
    data[big] = src[flat];
    for (size_t a = shape.size(); a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return GridField(std::move(bigShape), f.spacing(), std::move(data));
}

inline GridField crop_center(const GridField& g, const std::vector<int>& shape) {
  const auto& bigShape = g.shape();
  if (shape.size() != bigShape.size())
    throw InvalidArgument("crop_center: dimension mismatch");
  std::vector<int> offset(shape.size());
  size_t total = 1;
  for (size_t a = 0; a < shape.size(); ++a) {
    if (shape[a] < 1 || shape[a] > bigShape[a] || (bigShape[a] - shape[a]) % 2 != 0)
      throw InvalidArgument("crop_center: target shape must fit with even margins");
    offset[a] = (bigShape[a] - shape[a]) / 2;
    total *= static_cast<size_t>(shape[a]);
  }
  std::vector<double> data(total);
  const auto& src = g.data();
  std::vector<int> idx(shape.size(), 0);
  for (size_t flat = 0; flat < total; ++flat) {
    size_t big = 0;
    for (size_t a = 0; a < shape.size(); ++a)
      big = big * static_cast<size_t>(bigShape[a]) + static_cast<size_t>(idx[a] + offset[a]);
    data[flat] = src[big];
    for (size_t a = shape.size(); a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return GridField(shape, g.spacing(), std::move(data));
}

// ---------------------------------------------------------------------------
// End-to-end study: forward transform averaged over directions, inverted,
// compared against the input phantom.
// ---------------------------------------------------------------------------
struct ReconstructionReport {
  std::vector<int> gridShape;
  int numDirections = 0;
  double relL2Error = 0.0;
  double maxAbsError = 0.0;
  std::string dcHandling;
};

inline nlohmann::json to_json(const ReconstructionReport& r) {
  return nlohmann::json{{"grid_shape", r.gridShape},
                        {"num_directions", r.numDirections},
                        {"rel_l2_error", r.relL2Error},
                        {"max_abs_error", r.maxAbsError},
                        {"dc_handling", r.dcHandling}};
}

inline std::pair<GridField, ReconstructionReport> reconstruct(const GridField& f,
                                                              const DirectionSet& dirs,
                                                              double lineStep,
                                                              DcHandling dc = DcHandling::ZeroMean,
                                                              int padFactor = 2) {
  if (f.max_abs() > 0.0 && f.boundary_max_abs() > 1e-9 * f.max_abs())
    throw SupportClipped("reconstruct: phantom support reaches the box boundary");
  const GridField padded = zero_pad_centered(f, padFactor);
  const GridField avg = direction_average(padded, dirs, lineStep);
  const GridField recPadded =
      riesz_inverse(avg, dc, dc == DcHandling::ProvidedMean ? padded.mean() : 0.0);
  const GridField rec = crop_center(recPadded, f.shape());
  ReconstructionReport report;
  report.gridShape = f.shape();
  report.numDirections = static_cast<int>(dirs.directions.size());
  report.dcHandling = to_string(dc);
  report.maxAbsError = max_abs_diff(rec, f);
  const double ref = std::sqrt(f.mean_square());
  report.relL2Error = (ref == 0.0) ? 0.0 : std::sqrt(rec.plus(f, -1.0).mean_square()) / ref;
  return {rec, report};
}

inline DirectionSet DirectionSet::hemisphere(int muNodes, int phiCount) {
  if (muNodes < 1 || phiCount < 1)
    throw InvalidArgument("DirectionSet::hemisphere: need at least one node per factor");
  DirectionSet set;
  set.dim = 3;
  const Quad1D mu = gauss_legendre_01(muNodes);
  double wsum = 0.0;
  for (double w : mu.weights) wsum += w * phiCount;
  for (size_t i = 0; i < mu.nodes.size(); ++i) {
    const double m = mu.nodes[i];
    const double sin_th = std::sqrt(std::max(0.0, 1.0 - m * m));
    for (int j = 0; j < phiCount; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / phiCount;
      set.directions.push_back({sin_th * std::cos(phi), sin_th * std::sin(phi), m});
      set.weights.push_back(mu.weights[i] / wsum);
    }
  }
  return set;
}

}  // namespace opmeans
