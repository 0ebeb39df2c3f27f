// Quadrature oracles: direct sphere/ball averages, the complex circle mean,
// and the integral route that inverts the 1D moving average.  These are the
// independent references the operator implementations are judged against, so
// the tests here lean on closed forms only.

#include <catch2/catch_amalgamated.hpp>

#include <opmeans/oracle.hpp>
#include <opmeans/parallel.hpp>
#include <opmeans/phantoms.hpp>
#include <opmeans/poly_field.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace opmeans;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

PolyField x_squared(int dim) {
  PolyField::TermMap t;
  PolyField::Exponents e(static_cast<size_t>(dim), 0);
  e[0] = 2;
  t[e] = 1.0;
  return PolyField(dim, t);
}

}  // namespace

TEST_CASE("sphere mean closed forms") {
  SECTION("|x|^2 gains exactly r^2 in any dimension") {
    for (int n : {1, 2, 3}) {
      const PolyField f = PolyField::norm_squared(n);
      const std::vector<double> x(static_cast<size_t>(n), 0.4);
      const double r = 0.35;
      const double expected = f.evaluate(x) + r * r;
      REQUIRE(std::abs(sphere_mean_quadrature(f, x, r) - expected) < 1e-12);
    }
  }
  SECTION("harmonic x^2 - y^2 is unchanged") {
    PolyField::TermMap t;
    t[{2, 0}] = 1.0;
    t[{0, 2}] = -1.0;
    const PolyField f(2, t);
    const std::vector<double> x = {0.7, -0.2};
    REQUIRE(std::abs(sphere_mean_quadrature(f, x, 0.9) - f.evaluate(x)) < 1e-13);
  }
  SECTION("radius zero returns the point value") {
    const PolyField f = PolyField::norm_squared(2);
    const std::vector<double> x = {0.3, 0.1};
    REQUIRE(sphere_mean_quadrature(f, x, 0.0) == Catch::Approx(f.evaluate(x)).margin(1e-14));
  }
  SECTION("constants are reproduced at rounding level for every dimension") {
    // n >= 4 goes through the Monte Carlo sum, whose rounding drift scales
    // with the sample count; 1e-12 covers the 8192-term accumulation.
    for (int n : {1, 2, 3, 4, 5}) {
      const PolyField c = PolyField::constant(n, 0.7);
      const std::vector<double> x(static_cast<size_t>(n), 0.1);
      REQUIRE(std::abs(sphere_mean_quadrature(c, x, 0.8) - 0.7) < 1e-12);
    }
  }
}

TEST_CASE("sphere mean is stable under rule refinement") {
  const CosineSum f2 = CosineSum::random(2, kTau, 3, 5, 31);
  const std::vector<double> x2 = {2.0, 1.0};
  QuadratureRule coarse, fine;
  coarse.angularPoints = 32;
  fine.angularPoints = 64;
  REQUIRE(std::abs(sphere_mean_quadrature(f2, x2, 0.6, coarse) -
                   sphere_mean_quadrature(f2, x2, 0.6, fine)) < 1e-12);

  const CosineSum f3 = CosineSum::random(3, kTau, 2, 5, 32);
  const std::vector<double> x3 = {2.0, 1.0, 0.5};
  QuadratureRule c3, f3r;
  c3.muNodes = 16;
  c3.phiPoints = 32;
  REQUIRE(std::abs(sphere_mean_quadrature(f3, x3, 0.6, c3) -
                   sphere_mean_quadrature(f3, x3, 0.6, f3r)) < 1e-10);
}

TEST_CASE("kernel means against closed forms") {
  SECTION("ball in one dimension: x^2 -> x^2 + r^2/3") {
    const PolyField f = x_squared(1);
    const std::vector<double> x = {0.2};
    const double r = 0.5;
    REQUIRE(std::abs(kernel_mean_quadrature(f, x, r, KernelSpec::ball()) -
                     (0.04 + r * r / 3.0)) < 1e-13);
  }
  SECTION("bell(1) in three dimensions: |x|^2 -> |x|^2 + 3 r^2 / 7") {
    const PolyField f = PolyField::norm_squared(3);
    const std::vector<double> x = {0.1, -0.3, 0.2};
    const double r = 0.45;
    const double expected = f.evaluate(x) + 3.0 * r * r / 7.0;
    REQUIRE(std::abs(kernel_mean_quadrature(f, x, r, KernelSpec::bell(1.0)) - expected) < 1e-10);
  }
  SECTION("triangular(1) in one dimension: x^2 -> x^2 + r^2/6") {
    const PolyField f = x_squared(1);
    const std::vector<double> x = {0.3};
    const double r = 0.8;
    REQUIRE(std::abs(kernel_mean_quadrature(f, x, r, KernelSpec::triangular(1.0)) -
                     (0.09 + r * r / 6.0)) < 1e-10);
  }
  SECTION("sphere kernel delegates to the surface mean") {
    const PolyField f = PolyField::norm_squared(2);
    const std::vector<double> x = {0.5, 0.5};
    REQUIRE(kernel_mean_quadrature(f, x, 0.3, KernelSpec::sphere()) ==
            sphere_mean_quadrature(f, x, 0.3));
  }
  SECTION("constants are reproduced for every kernel") {
    const PolyField c = PolyField::constant(2, -1.3);
    const std::vector<double> x = {1.0, 2.0};
    for (const KernelSpec& k : {KernelSpec::ball(), KernelSpec::bell(2.0),
                                KernelSpec::triangular(0.5)})
      REQUIRE(std::abs(kernel_mean_quadrature(c, x, 0.7, k) + 1.3) < 5e-14);
  }
  SECTION("radial refinement is converged") {
    const CosineSum f = CosineSum::random(2, kTau, 3, 5, 33);
    const std::vector<double> x = {2.5, 1.5};
    QuadratureRule coarse;
    coarse.radialNodes = 128;
    REQUIRE(std::abs(kernel_mean_quadrature(f, x, 0.6, KernelSpec::ball(), coarse) -
                     kernel_mean_quadrature(f, x, 0.6, KernelSpec::ball())) < 1e-12);
  }
}

TEST_CASE("Monte Carlo sphere mean") {
  const PolyField f = x_squared(4);
  const std::vector<double> x(4, 0.0);
  const double r = 0.3;
  QuadratureRule rule;

  SECTION("estimate brackets the closed form within four standard errors") {
    // Sphere mean of x1^2 at the origin is r^2 / n.
    const McEstimate est = monte_carlo_sphere_mean(f, x, r, rule);
    REQUIRE(est.standardError > 0.0);
    REQUIRE(std::abs(est.mean - r * r / 4.0) < 4.0 * est.standardError);
  }
  SECTION("same seed gives bit-identical results; different seeds differ") {
    const McEstimate a = monte_carlo_sphere_mean(f, x, r, rule);
    const McEstimate b = monte_carlo_sphere_mean(f, x, r, rule);
    REQUIRE(a.mean == b.mean);
    REQUIRE(a.standardError == b.standardError);
    QuadratureRule other = rule;
    other.seed = 777;
    REQUIRE(monte_carlo_sphere_mean(f, x, r, other).mean != a.mean);
  }
  SECTION("counter-based sampling is immune to the thread budget") {
    const int saved = thread_budget();
    thread_budget() = 1;
    const McEstimate a = monte_carlo_sphere_mean(f, x, r, rule);
    thread_budget() = 4;
    const McEstimate b = monte_carlo_sphere_mean(f, x, r, rule);
    thread_budget() = saved;
    REQUIRE(a.mean == b.mean);
  }
  SECTION("dimension dispatch reaches Monte Carlo at n = 4") {
    REQUIRE(sphere_mean_quadrature(f, x, r, rule) ==
            monte_carlo_sphere_mean(f, x, r, rule).mean);
  }
}

TEST_CASE("oracle argument guards") {
  const PolyField f = PolyField::norm_squared(2);
  const std::vector<double> bad = {1.0};
  REQUIRE_THROWS_AS(sphere_mean_quadrature(f, bad, 0.5), InvalidArgument);
  const std::vector<double> nan = {std::nan(""), 0.0};
  REQUIRE_THROWS_AS(sphere_mean_quadrature(f, nan, 0.5), OutOfDomain);
  const std::vector<double> x = {0.0, 0.0};
  REQUIRE_THROWS_AS(sphere_mean_quadrature(f, x, -1.0), InvalidArgument);
  QuadratureRule rule;
  rule.angularPoints = 2;
  REQUIRE_THROWS_AS(sphere_mean_quadrature(f, x, 0.5, rule), InvalidArgument);
  QuadratureRule mc;
  mc.mcSamples = 1;
  const PolyField f4 = PolyField::norm_squared(4);
  const std::vector<double> x4(4, 0.0);
  REQUIRE_THROWS_AS(monte_carlo_sphere_mean(f4, x4, 0.5, mc), InvalidArgument);
}

TEST_CASE("complex circle mean of polynomials") {
  using C = std::complex<double>;
  SECTION("z^2 about 1+i averages to the center value 2i") {
    const std::vector<C> zsq = {C(0, 0), C(0, 0), C(1, 0)};
    const C got = complex_circle_mean(zsq, C(1, 1), 0.5, 16);
    REQUIRE(std::abs(got - C(0, 2)) < 1e-13);
  }
  SECTION("z^3 - 2z about 0.5 averages to -0.875") {
    const std::vector<C> p = {C(0, 0), C(-2, 0), C(0, 0), C(1, 0)};
    const C got = complex_circle_mean(p, C(0.5, 0.0), 1.25, 32);
    REQUIRE(std::abs(got - C(-0.875, 0.0)) < 1e-13);
  }
  SECTION("constants and guards") {
    const std::vector<C> c = {C(3, -1)};
    REQUIRE(complex_circle_mean(c, C(9, 9), 2.0, 1) == C(3, -1));
    REQUIRE_THROWS_AS(complex_circle_mean(std::vector<C>{}, C(0, 0), 1.0, 8), InvalidArgument);
    const std::vector<C> quad = {C(1, 0), C(0, 0), C(1, 0)};
    REQUIRE_THROWS_AS(complex_circle_mean(quad, C(0, 0), 1.0, 4), InvalidArgument);
  }
}

TEST_CASE("integral inversion of the moving average recovers a Gaussian") {
  const GaussianBump1D bump;
  const double r = 0.5;
  const auto d1 = [&](double x) { return bump.moving_average_d1(x, r); };
  const auto d3 = [&](double x) { return bump.moving_average_d3(x, r); };
  SECTION("peak value") {
    const double got = moving_average_integral_inverse(d1, d3, r, 0.0, 8.0);
    REQUIRE(std::abs(got - 1.0) < 1e-4);
  }
  SECTION("off-center value") {
    const double got = moving_average_integral_inverse(d1, d3, r, 0.6, 8.0);
    REQUIRE(std::abs(got - bump.f(0.6)) < 1e-4);
  }
  SECTION("an unmeetable tail tolerance raises TailNotConverged") {
    const auto zero = [](double) { return 0.0; };
    REQUIRE_THROWS_AS(
        moving_average_integral_inverse(zero, zero, 1.0, 0.0, 1e-4, 8, -1.0),
        TailNotConverged);
  }
  SECTION("argument guards") {
    REQUIRE_THROWS_AS(moving_average_integral_inverse(d1, d3, -1.0, 0.0, 8.0), InvalidArgument);
    REQUIRE_THROWS_AS(moving_average_integral_inverse(d1, d3, r, 0.0, 0.0), InvalidArgument);
    REQUIRE_THROWS_AS(moving_average_integral_inverse(d1, d3, r, 0.0, 8.0, 4), InvalidArgument);
  }
}
