#pragma once

#include <opmeans/errors.hpp>

#include <fftw3.h>

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace opmeans {

static_assert(std::endian::native == std::endian::little,
              "GRDF I/O writes raw little-endian scalars");

namespace detail {

// FFTW plan creation/destruction is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  fftw_complex* p = nullptr;
  explicit FftwBuffer(size_t n) : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

inline void run_dft(const std::vector<int>& shape, const std::complex<double>* in,
                    std::complex<double>* out, int sign) {
  size_t total = 1;
  for (int n : shape) total *= static_cast<size_t>(n);
  FftwBuffer a(total), b(total);
  std::memcpy(static_cast<void*>(a.p), static_cast<const void*>(in),
              sizeof(fftw_complex) * total);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), a.p, b.p, sign,
                         FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::memcpy(static_cast<void*>(out), static_cast<const void*>(b.p),
              sizeof(fftw_complex) * total);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spectral multiplier psi(lambda) applied to the eigenvalues lambda = -|k|^2
// of the periodic Laplacian.  The symbol must be finite at every populated
// mode; the DC (k = 0) coefficient can instead be pinned to zero mean or a
// provided mean for symbols defined only up to constants.
// ---------------------------------------------------------------------------
struct SpectralMultiplier {
  enum class Dc { Symbol, ZeroMean, ProvidedMean };

  std::function<double(double)> symbol;  // lambda <= 0  ->  psi(lambda)
  Dc dc = Dc::Symbol;
  double dcMean = 0.0;
};

// ---------------------------------------------------------------------------
// Uniform periodic grid field on a box [0, N1*h1) x ... with real samples in
// row-major order (last axis fastest).  Fields are immutable; operators
// return new fields.  Spectral quantities use wavenumbers k_m = 2 pi m / L
// with m in the symmetric range and the Nyquist mode treated as cosine-only.
// ---------------------------------------------------------------------------
class GridField {
 public:
  GridField(std::vector<int> shape, std::vector<double> spacing, std::vector<double> data)
      : shape_(std::move(shape)), spacing_(std::move(spacing)) {
    if (shape_.empty() || shape_.size() > 3)
      throw InvalidArgument("GridField: dimension must be 1..3");
    if (spacing_.size() != shape_.size())
      throw InvalidArgument("GridField: spacing arity mismatch");
    size_t total = 1;
    for (int n : shape_) {
      if (n < 2) throw InvalidArgument("GridField: each axis needs at least 2 samples");
      total *= static_cast<size_t>(n);
    }
    for (double h : spacing_)
      if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidArgument("GridField: spacing must be positive and finite");
    if (data.size() != total) throw InvalidArgument("GridField: data size mismatch");
    for (double v : data)
      if (!std::isfinite(v)) throw InvalidArgument("GridField: non-finite sample");
    data_ = std::make_shared<const std::vector<double>>(std::move(data));
    cache_ = std::make_shared<SpectrumCache>();
  }

  // Sample a callable f(point) on the grid.
  template <class Fn>
  static GridField sample(std::vector<int> shape, std::vector<double> spacing, Fn&& f) {
    size_t total = 1;
    for (int n : shape) total *= static_cast<size_t>(n);
    std::vector<double> data(total);
    std::vector<int> idx(shape.size(), 0);
    std::vector<double> x(shape.size());
    for (size_t flat = 0; flat < total; ++flat) {
      for (size_t a = 0; a < shape.size(); ++a) x[a] = idx[a] * spacing[a];
      data[flat] = f(std::span<const double>(x));
      for (size_t a = shape.size(); a-- > 0;) {
        if (++idx[a] < shape[a]) break;
        idx[a] = 0;
      }
    }
    return GridField(std::move(shape), std::move(spacing), std::move(data));
  }

  int dim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<double>& data() const { return *data_; }

  size_t size() const { return data_->size(); }

  double axis_length(int axis) const {
    return shape_[static_cast<size_t>(axis)] * spacing_[static_cast<size_t>(axis)];
  }

  bool same_layout(const GridField& o) const {
    return shape_ == o.shape_ && spacing_ == o.spacing_;
  }

  double at(std::span<const int> idx) const { return (*data_)[flat_index(idx)]; }

  size_t flat_index(std::span<const int> idx) const {
    size_t flat = 0;
    for (size_t a = 0; a < shape_.size(); ++a) {
      int i = idx[a] % shape_[a];
      if (i < 0) i += shape_[a];
      flat = flat * static_cast<size_t>(shape_[a]) + static_cast<size_t>(i);
    }
    return flat;
  }

  // Signed mode index for axis position m: 0..N/2, then negative.
  static int mode_index(int m, int n) { return (m <= n / 2) ? m : m - n; }

  double wavenumber(int axis, int m) const {
    const int n = shape_[static_cast<size_t>(axis)];
    return 2.0 * std::numbers::pi * mode_index(m, n) / axis_length(axis);
  }

  // Largest |k| along any axis (the corner mode has norm sqrt(sum k_i^2)).
  double max_wavenumber_norm() const {
    double s = 0.0;
    for (int a = 0; a < dim(); ++a) {
      const int n = shape_[static_cast<size_t>(a)];
      const double k = 2.0 * std::numbers::pi * (n / 2) / axis_length(a);
      s += k * k;
    }
    return std::sqrt(s);
  }

  // --- statistics ---------------------------------------------------------

  double mean() const {
    double s = 0.0;
    for (double v : *data_) s += v;
    return s / static_cast<double>(size());
  }

  double mean_square() const {
    double s = 0.0;
    for (double v : *data_) s += v * v;
    return s / static_cast<double>(size());
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : *data_) m = std::max(m, std::abs(v));
    return m;
  }

  // Largest |sample| on the outermost index slabs (support/padding check).
  double boundary_max_abs() const {
    double m = 0.0;
    const size_t total = size();
    std::vector<int> idx(shape_.size(), 0);
    for (size_t flat = 0; flat < total; ++flat) {
      bool onBoundary = false;
      for (size_t a = 0; a < shape_.size(); ++a)
        if (idx[a] == 0 || idx[a] == shape_[a] - 1) onBoundary = true;
      if (onBoundary) m = std::max(m, std::abs((*data_)[flat]));
      for (size_t a = shape_.size(); a-- > 0;) {
        if (++idx[a] < shape_[a]) break;
        idx[a] = 0;
      }
    }
    return m;
  }

  // --- spectral operators -------------------------------------------------

  GridField apply(const SpectralMultiplier& mult) const {
    const auto& spec = spectrum();
    std::vector<std::complex<double>> out(spec.size());
    double maxMag = 0.0;
    for (const auto& c : spec) maxMag = std::max(maxMag, std::abs(c));
    const double populated = 1e-13 * maxMag;

    const size_t total = size();
    std::vector<int> idx(shape_.size(), 0);
    for (size_t flat = 0; flat < total; ++flat) {
      bool isDc = true;
      double k2 = 0.0;
      for (size_t a = 0; a < shape_.size(); ++a) {
        const double k = wavenumber(static_cast<int>(a), idx[a]);
        if (idx[a] != 0) isDc = false;
        k2 += k * k;
      }
      double psi;
      if (isDc && mult.dc == SpectralMultiplier::Dc::ZeroMean) {
        out[flat] = 0.0;
        psi = 0.0;
      } else if (isDc && mult.dc == SpectralMultiplier::Dc::ProvidedMean) {
        out[flat] = mult.dcMean * static_cast<double>(total);
        psi = 0.0;
      } else {
        psi = mult.symbol(-k2);
        if (!std::isfinite(psi)) {
          if (std::abs(spec[flat]) > populated)
            throw MultiplierSingular("apply(multiplier): symbol not finite at populated mode",
                                     std::sqrt(k2));
          out[flat] = 0.0;  // noise-level content under a singular symbol: drop
        } else {
          out[flat] = spec[flat] * psi;
        }
      }
      for (size_t a = shape_.size(); a-- > 0;) {
        if (++idx[a] < shape_[a]) break;
        idx[a] = 0;
      }
    }
    return from_spectrum(std::move(out));
  }

  GridField laplacian() const {
    return apply({.symbol = [](double lambda) { return lambda; }});
  }

  // Spectral derivative along one axis: multiply by (i k)^order.  For odd
  // orders the Nyquist mode has no sine partner on the grid and is zeroed.
  GridField derivative_axis(int axis, int order) const {
    if (axis < 0 || axis >= dim()) throw InvalidArgument("derivative_axis: bad axis");
    if (order < 1) throw InvalidArgument("derivative_axis: order must be >= 1");
    const auto& spec = spectrum();
    std::vector<std::complex<double>> out(spec.size());
    const size_t total = size();
    const int n = shape_[static_cast<size_t>(axis)];
    const bool odd = (order % 2) != 0;
    std::vector<int> idx(shape_.size(), 0);
    for (size_t flat = 0; flat < total; ++flat) {
      const int m = idx[static_cast<size_t>(axis)];
      if (odd && n % 2 == 0 && m == n / 2) {
        out[flat] = 0.0;
      } else {
        const double k = wavenumber(axis, m);
        const std::complex<double> ik(0.0, k);
        std::complex<double> f(1.0, 0.0);
        for (int p = 0; p < order; ++p) f *= ik;
        out[flat] = spec[flat] * f;
      }
      for (size_t a = shape_.size(); a-- > 0;) {
        if (++idx[a] < shape_[a]) break;
        idx[a] = 0;
      }
    }
    return from_spectrum(std::move(out));
  }

  // --- spectral interpolation --------------------------------------------

  // Trigonometric interpolation at an arbitrary point; coordinates are
  // reduced into the periodic box (the domain is the torus).
  double evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim())
      throw InvalidArgument("GridField::evaluate: point arity mismatch");
    for (double xi : x)
      if (!std::isfinite(xi)) throw OutOfDomain("GridField::evaluate: non-finite point");

    const auto& spec = spectrum();
    std::vector<std::vector<std::complex<double>>> phase(shape_.size());
    for (size_t a = 0; a < shape_.size(); ++a) {
      const double L = axis_length(static_cast<int>(a));
      double xa = std::fmod(x[a], L);
      if (xa < 0) xa += L;
      const int n = shape_[a];
      phase[a].resize(static_cast<size_t>(n));
      for (int m = 0; m < n; ++m) {
        const double k = wavenumber(static_cast<int>(a), m);
        phase[a][static_cast<size_t>(m)] = std::polar(1.0, k * xa);
      }
    }
    std::complex<double> acc(0.0, 0.0);
    const size_t total = size();
    std::vector<int> idx(shape_.size(), 0);
    for (size_t flat = 0; flat < total; ++flat) {
      std::complex<double> p = spec[flat];
      for (size_t a = 0; a < shape_.size(); ++a) p *= phase[a][static_cast<size_t>(idx[a])];
      acc += p;
      for (size_t a = shape_.size(); a-- > 0;) {
        if (++idx[a] < shape_[a]) break;
        idx[a] = 0;
      }
    }
    return acc.real() / static_cast<double>(total);
  }

  // Values of the trig interpolant at base + (l0 + j*step) * dir for
  // j = 0..count-1, via per-mode phase rotation (one complex multiply per
  // mode per sample instead of a fresh exponential).
  std::vector<double> sample_line(std::span<const double> base, std::span<const double> dir,
                                  double l0, double step, int count) const {
    if (static_cast<int>(base.size()) != dim() || static_cast<int>(dir.size()) != dim())
      throw InvalidArgument("sample_line: arity mismatch");
    if (count < 1) throw InvalidArgument("sample_line: count must be >= 1");
    const auto& spec = spectrum();
    const size_t total = size();
    std::vector<std::complex<double>> g(total), ratio(total);
    std::vector<int> idx(shape_.size(), 0);
    for (size_t flat = 0; flat < total; ++flat) {
      double kx = 0.0, kd = 0.0;
      for (size_t a = 0; a < shape_.size(); ++a) {
        const double k = wavenumber(static_cast<int>(a), idx[a]);
        kx += k * (base[a] + l0 * dir[a]);
        kd += k * dir[a];
      }
      g[flat] = spec[flat] * std::polar(1.0, kx);
      ratio[flat] = std::polar(1.0, kd * step);
      for (size_t a = shape_.size(); a-- > 0;) {
        if (++idx[a] < shape_[a]) break;
        idx[a] = 0;
      }
    }
    std::vector<double> out(static_cast<size_t>(count));
    for (int j = 0; j < count; ++j) {
      std::complex<double> acc(0.0, 0.0);
      for (size_t flat = 0; flat < total; ++flat) acc += g[flat];
      out[static_cast<size_t>(j)] = acc.real() / static_cast<double>(total);
      if (j + 1 < count)
        for (size_t flat = 0; flat < total; ++flat) g[flat] *= ratio[flat];
    }
    return out;
  }

  // Local cubic (Catmull-Rom) interpolation with periodic wrap: a 4-tap
  // stencil per axis instead of the full spectral sum, for inner loops that
  // touch millions of points.  Reproduces cubics exactly; error O(h^4) on
  // smooth data.
  double evaluate_cubic(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim())
      throw InvalidArgument("GridField::evaluate_cubic: point arity mismatch");
    std::array<std::array<double, 4>, 3> w{};
    std::array<std::array<size_t, 4>, 3> tap{};
    std::array<size_t, 3> stride{};
    size_t s = 1;
    for (int a = dim(); a-- > 0;) {
      stride[static_cast<size_t>(a)] = s;
      s *= static_cast<size_t>(shape_[static_cast<size_t>(a)]);
    }
    for (int a = 0; a < dim(); ++a) {
      if (!std::isfinite(x[static_cast<size_t>(a)]))
        throw OutOfDomain("GridField::evaluate_cubic: non-finite point");
      const int n = shape_[static_cast<size_t>(a)];
      const double L = axis_length(a);
      double xa = std::fmod(x[static_cast<size_t>(a)], L);
      if (xa < 0) xa += L;
      const double u = xa / spacing_[static_cast<size_t>(a)];
      int i1 = static_cast<int>(std::floor(u));
      const double t = u - i1;
      for (int q = 0; q < 4; ++q)
        tap[static_cast<size_t>(a)][static_cast<size_t>(q)] =
            static_cast<size_t>(((i1 - 1 + q) % n + n) % n) * stride[static_cast<size_t>(a)];
      const double t2 = t * t, t3 = t2 * t;
      auto& wa = w[static_cast<size_t>(a)];
      wa[0] = 0.5 * (-t3 + 2.0 * t2 - t);
      wa[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
      wa[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
      wa[3] = 0.5 * (t3 - t2);
    }
    const std::vector<double>& d = *data_;
    double acc = 0.0;
    if (dim() == 1) {
      for (int q = 0; q < 4; ++q) acc += w[0][static_cast<size_t>(q)] * d[tap[0][static_cast<size_t>(q)]];
    } else if (dim() == 2) {
      for (int qa = 0; qa < 4; ++qa) {
        double row = 0.0;
        for (int qb = 0; qb < 4; ++qb)
          row += w[1][static_cast<size_t>(qb)] *
                 d[tap[0][static_cast<size_t>(qa)] + tap[1][static_cast<size_t>(qb)]];
        acc += w[0][static_cast<size_t>(qa)] * row;
      }
    } else {
      for (int qa = 0; qa < 4; ++qa) {
        double plane = 0.0;
        for (int qb = 0; qb < 4; ++qb) {
          double row = 0.0;
          for (int qc = 0; qc < 4; ++qc)
            row += w[2][static_cast<size_t>(qc)] *
                   d[tap[0][static_cast<size_t>(qa)] + tap[1][static_cast<size_t>(qb)] +
                     tap[2][static_cast<size_t>(qc)]];
          plane += w[1][static_cast<size_t>(qb)] * row;
        }
        acc += w[0][static_cast<size_t>(qa)] * plane;
      }
    }
    return acc;
  }

  // Visit every spectral mode: fn(flat, k2, isDc) with k2 = |k|^2.
  template <class Fn>
  void for_each_mode(Fn&& fn) const {
    const size_t total = size();
    std::vector<int> idx(shape_.size(), 0);
    for (size_t flat = 0; flat < total; ++flat) {
      double k2 = 0.0;
      bool isDc = true;
      for (size_t a = 0; a < shape_.size(); ++a) {
        const double k = wavenumber(static_cast<int>(a), idx[a]);
        k2 += k * k;
        if (idx[a] != 0) isDc = false;
      }
      fn(flat, k2, isDc);
      for (size_t a = shape_.size(); a-- > 0;) {
        if (++idx[a] < shape_[a]) break;
        idx[a] = 0;
      }
    }
  }

  // Forward spectrum (unnormalized), computed once and shared by copies.
  const std::vector<std::complex<double>>& spectrum() const {
    std::call_once(cache_->flag, [&] {
      std::vector<std::complex<double>> in(size());
      for (size_t i = 0; i < in.size(); ++i) in[i] = (*data_)[i];
      cache_->spec.resize(size());
      detail::run_dft(shape_, in.data(), cache_->spec.data(), FFTW_FORWARD);
    });
    return cache_->spec;
  }

  GridField from_spectrum(std::vector<std::complex<double>> spec) const {
    std::vector<std::complex<double>> out(spec.size());
    detail::run_dft(shape_, spec.data(), out.data(), FFTW_BACKWARD);
    std::vector<double> data(out.size());
    const double invTotal = 1.0 / static_cast<double>(size());
    for (size_t i = 0; i < out.size(); ++i) data[i] = out[i].real() * invTotal;
    return GridField(shape_, spacing_, std::move(data));
  }

  // --- pointwise combinations --------------------------------------------

  GridField scaled(double s) const {
    std::vector<double> d = *data_;
    for (double& v : d) v *= s;
    return GridField(shape_, spacing_, std::move(d));
  }

  GridField plus(const GridField& o, double weight = 1.0) const {
    if (!same_layout(o)) throw InvalidArgument("GridField::plus: layout mismatch");
    std::vector<double> d = *data_;
    for (size_t i = 0; i < d.size(); ++i) d[i] += weight * (*o.data_)[i];
    return GridField(shape_, spacing_, std::move(d));
  }

 private:
  struct SpectrumCache {
    std::once_flag flag;
    std::vector<std::complex<double>> spec;
  };

  std::vector<int> shape_;
  std::vector<double> spacing_;
  std::shared_ptr<const std::vector<double>> data_;
  std::shared_ptr<SpectrumCache> cache_;
};

inline double max_abs_diff(const GridField& a, const GridField& b) {
  if (!a.same_layout(b)) throw InvalidArgument("max_abs_diff: layout mismatch");
  double m = 0.0;
  for (size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double rel_l2_diff(const GridField& a, const GridField& ref) {
  if (!a.same_layout(ref)) throw InvalidArgument("rel_l2_diff: layout mismatch");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - ref.data()[i];
    num += d * d;
    den += ref.data()[i] * ref.data()[i];
  }
  if (den == 0.0) throw InvalidArgument("rel_l2_diff: zero reference field");
  return std::sqrt(num / den);
}

// ---------------------------------------------------------------------------
// GRDF container: magic "GRDF", version byte (1), dimension byte, then per
// axis a u32 sample count and f64 spacing, then the row-major f64 samples.
// All scalars little-endian.
// ---------------------------------------------------------------------------
inline void write_grdf(const GridField& f, std::ostream& out) {
  const char magic[4] = {'G', 'R', 'D', 'F'};
  out.write(magic, 4);
  const uint8_t version = 1;
  const uint8_t dim = static_cast<uint8_t>(f.dim());
  out.write(reinterpret_cast<const char*>(&version), 1);
  out.write(reinterpret_cast<const char*>(&dim), 1);
  for (int a = 0; a < f.dim(); ++a) {
    const uint32_t n = static_cast<uint32_t>(f.shape()[static_cast<size_t>(a)]);
    const double h = f.spacing()[static_cast<size_t>(a)];
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&h), 8);
  }
  out.write(reinterpret_cast<const char*>(f.data().data()),
            static_cast<std::streamsize>(f.data().size() * sizeof(double)));
  if (!out) throw FormatError("write_grdf: stream failure");
}

inline void write_grdf(const GridField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("write_grdf: cannot open " + path);
  write_grdf(f, out);
}

inline GridField read_grdf(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GRDF", 4) != 0)
    throw FormatError("read_grdf: bad magic (not a GRDF stream)");
  uint8_t version = 0, dim = 0;
  in.read(reinterpret_cast<char*>(&version), 1);
  in.read(reinterpret_cast<char*>(&dim), 1);
  if (!in || version != 1) throw FormatError("read_grdf: unsupported version");
  if (dim < 1 || dim > 3) throw FormatError("read_grdf: dimension must be 1..3");
  std::vector<int> shape(dim);
  std::vector<double> spacing(dim);
  size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    uint32_t n = 0;
    double h = 0.0;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&h), 8);
    if (!in || n < 2 || n > (1u << 24)) throw FormatError("read_grdf: bad axis count");
    if (!(h > 0.0) || !std::isfinite(h)) throw FormatError("read_grdf: bad spacing");
    shape[static_cast<size_t>(a)] = static_cast<int>(n);
    spacing[static_cast<size_t>(a)] = h;
    total *= n;
  }
  std::vector<double> data(total);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(total * sizeof(double)));
  if (!in) throw FormatError("read_grdf: truncated data section");
  for (double v : data)
    if (!std::isfinite(v)) throw FormatError("read_grdf: non-finite sample");
  return GridField(std::move(shape), std::move(spacing), std::move(data));
}

inline GridField read_grdf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("read_grdf: cannot open " + path);
  return read_grdf(in);
}

}  // namespace opmeans
