#pragma once

#include <stdexcept>
#include <string>

namespace opmeans {

//! Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

//! A hypergeometric lower parameter is zero or a negative integer.
struct PoleParameter : Error {
  using Error::Error;
};

//! Series reciprocal requested but the constant term vanishes.
struct ZeroLeadingCoefficient : Error {
  using Error::Error;
};

//! Series power requested but the constant term is not one.
struct LeadingCoefficientNotOne : Error {
  using Error::Error;
};

//! A spectral multiplier is singular (or below the safety guard) at an
//! eigenvalue that carries field content.  `where` is the offending r*kappa
//! (or kappa) value, for diagnostics.
struct MultiplierSingular : Error {
  double where;
  MultiplierSingular(const std::string& what, double where_)
      : Error(what), where(where_) {}
};

//! Spectral evaluation was requested for a field type without a spectrum.
struct NonGridSpectral : Error {
  using Error::Error;
};

//! Moving-average inversion outside the first symbol period: some grid mode
//! has r*k at or beyond pi.  `rk` is the smallest offending value.
struct BandLimitExceeded : Error {
  double rk;
  BandLimitExceeded(const std::string& what, double rk_) : Error(what), rk(rk_) {}
};

//! A sample point is not representable in the field's domain.
struct OutOfDomain : Error {
  using Error::Error;
};

//! A line truncation window cuts off non-negligible field content.
struct SupportClipped : Error {
  using Error::Error;
};

//! An improper-integral tail failed its doubling stability check.
struct TailNotConverged : Error {
  using Error::Error;
};

//! Malformed on-disk data (GRDF header, field JSON, ...).
struct FormatError : Error {
  using Error::Error;
};

//! Generic precondition violation on an argument.
struct InvalidArgument : Error {
  using Error::Error;
};

}  // namespace opmeans
