#pragma once

// Umbrella header: operator-series spherical/kernel means, their inverses,
// radius-evolution checks, and line-transform reconstruction.

#include <opmeans/version.hpp>
#include <opmeans/errors.hpp>
#include <opmeans/rational.hpp>
#include <opmeans/series.hpp>
#include <opmeans/quadrature.hpp>
#include <opmeans/kernels.hpp>
#include <opmeans/poly_field.hpp>
#include <opmeans/plane_wave.hpp>
#include <opmeans/grid_field.hpp>
#include <opmeans/apply_series.hpp>
#include <opmeans/meanops.hpp>
#include <opmeans/oracle.hpp>
#include <opmeans/pdecheck.hpp>
#include <opmeans/parallel.hpp>
#include <opmeans/xray.hpp>
#include <opmeans/phantoms.hpp>

namespace opmeans {}
