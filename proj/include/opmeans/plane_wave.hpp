#pragma once

#include <opmeans/errors.hpp>

#include <cmath>
#include <span>
#include <vector>

namespace opmeans {

// ---------------------------------------------------------------------------
// A single plane wave a * cos(k.x + phase): an exact eigenfunction of the
// Laplacian with eigenvalue -|k|^2, and therefore of every radial operator
// built from it.  Operators act by scaling the amplitude.
// ---------------------------------------------------------------------------
class PlaneWaveField {
 public:
  PlaneWaveField(std::vector<double> wavevector, double amplitude, double phase = 0.0)
      : k_(std::move(wavevector)), amplitude_(amplitude), phase_(phase) {
    if (k_.empty()) throw InvalidArgument("PlaneWaveField: empty wavevector");
    for (double ki : k_)
      if (!std::isfinite(ki)) throw InvalidArgument("PlaneWaveField: non-finite wavevector");
  }

  int dim() const { return static_cast<int>(k_.size()); }
  const std::vector<double>& wavevector() const { return k_; }
  double amplitude() const { return amplitude_; }
  double phase() const { return phase_; }

  double k_norm_squared() const {
    double s = 0.0;
    for (double ki : k_) s += ki * ki;
    return s;
  }

  // Laplacian eigenvalue -|k|^2.
  double eigenvalue() const { return -k_norm_squared(); }

  double evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim())
      throw InvalidArgument("PlaneWaveField::evaluate: point arity mismatch");
    double arg = phase_;
    for (int i = 0; i < dim(); ++i) arg += k_[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
    return amplitude_ * std::cos(arg);
  }

  PlaneWaveField laplacian() const { return with_amplitude(amplitude_ * eigenvalue()); }

  PlaneWaveField with_amplitude(double a) const { return PlaneWaveField(k_, a, phase_); }

  PlaneWaveField scaled(double s) const { return with_amplitude(amplitude_ * s); }

  // Addition is defined within one eigenspace only: both waves must share the
  // wavevector and phase, so the sum lives in amplitude space.
  PlaneWaveField plus(const PlaneWaveField& o, double weight = 1.0) const {
    if (k_ != o.k_ || phase_ != o.phase_)
      throw InvalidArgument("PlaneWaveField::plus: wavevector or phase mismatch");
    return with_amplitude(amplitude_ + weight * o.amplitude_);
  }

 private:
  std::vector<double> k_;
  double amplitude_;
  double phase_;
};

}  // namespace opmeans
