// Line transform pipeline: forward line integrals, direction sets and
// sinograms, the direction average with its 1/|k| symbol, the exact
// inversion constants, and the end-to-end reconstruction study.

#include <catch2/catch_amalgamated.hpp>

#include <opmeans/phantoms.hpp>
#include <opmeans/xray.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace opmeans;

namespace {

const double kRoot2Pi = std::sqrt(2.0 * std::numbers::pi);

// Shared 2D phantom: two offset Gaussians of opposite sign on the unit box.
GaussianPair pair_2d(double sigma = 0.05) {
  return GaussianPair::centered(2, 1.0, sigma, 0.2);
}

GridField pair_grid(int n, double sigma = 0.05) {
  return pair_2d(sigma).sample_to_grid({n, n}, 1.0);
}

}  // namespace

TEST_CASE("forward line integral of a Gaussian") {
  const double sigma = 0.05;
  const GaussianPair pair = pair_2d(sigma);
  // Line through the positive blob, perpendicular to the pair axis: the
  // negative blob sits 0.2 away, so the closed form is
  // sigma sqrt(2 pi) (1 - exp(-0.2^2 / 2 sigma^2)).
  const double diag = std::numbers::sqrt2 / 2.0;
  LineSpec line;
  line.basePoint = pair.center1;
  line.direction = {-diag, diag};
  line.lmin = -0.45;
  line.lmax = 0.45;
  line.step = sigma / 5.0;
  const double expected = sigma * kRoot2Pi * (1.0 - std::exp(-8.0));

  SECTION("analytic evaluator route") {
    const auto fn = [&](const std::vector<double>& p) {
      return pair.evaluate(p);
    };
    REQUIRE(std::abs(xray_forward(fn, line, 2, 1.0) - expected) < 1e-8);
  }
  SECTION("grid interpolation route") {
    const GridField f = pair_grid(64, sigma);
    REQUIRE(std::abs(xray_forward(f, line) - expected) < 1e-8);
  }
  SECTION("flipping the direction leaves the integral unchanged") {
    const GridField f = pair_grid(64, sigma);
    LineSpec flipped = line;
    flipped.direction = {diag, -diag};
    REQUIRE(std::abs(xray_forward(f, line) - xray_forward(f, flipped)) < 1e-13);
  }
  SECTION("a window that cuts the support is rejected") {
    const GridField f = pair_grid(64, sigma);
    LineSpec clipped = line;
    clipped.lmin = -0.1;
    clipped.lmax = 0.1;
    REQUIRE_THROWS_AS(xray_forward(f, clipped), SupportClipped);
  }
  SECTION("a line far from the support integrates to zero") {
    const GridField padded = zero_pad_centered(pair_grid(64, sigma), 2);
    LineSpec far;
    far.basePoint = {1.0 - 0.8 * diag, 1.0 - 0.8 * diag};
    far.direction = {-diag, diag};
    far.lmin = -0.8;
    far.lmax = 0.8;
    far.step = sigma / 5.0;
    REQUIRE(std::abs(xray_forward(padded, far)) < 1e-12);
  }
  SECTION("line validation") {
    LineSpec bad = line;
    bad.direction = {1.0, 1.0};  // not unit
    REQUIRE_THROWS_AS(validate(bad, 2), InvalidArgument);
    bad = line;
    bad.lmax = bad.lmin;
    REQUIRE_THROWS_AS(validate(bad, 2), InvalidArgument);
    bad = line;
    bad.step = 0.0;
    REQUIRE_THROWS_AS(validate(bad, 2), InvalidArgument);
  }
}

TEST_CASE("direction sets") {
  SECTION("half circle") {
    const DirectionSet set = DirectionSet::half_circle(4);
    REQUIRE_NOTHROW(validate(set));
    REQUIRE(set.dim == 2);
    REQUIRE(set.directions.size() == 4);
    REQUIRE(set.weight_sum() == Catch::Approx(1.0).epsilon(1e-15));
    REQUIRE(set.angle(1) == Catch::Approx(std::numbers::pi / 4.0));
    REQUIRE_THROWS_AS(DirectionSet::half_circle(0), InvalidArgument);
  }
  SECTION("hemisphere") {
    const DirectionSet set = DirectionSet::hemisphere(4, 8);
    REQUIRE_NOTHROW(validate(set));
    REQUIRE(set.dim == 3);
    REQUIRE(set.directions.size() == 32);
    REQUIRE(set.weight_sum() == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE_THROWS_AS(DirectionSet::hemisphere(0, 8), InvalidArgument);
  }
}

TEST_CASE("sinogram tabulation") {
  // Padded so the extreme-offset lines probe genuine zeros rather than the
  // phantom's periodic images.
  const GridField f = zero_pad_centered(pair_grid(64, 0.07), 2);
  const Sinogram sino = make_sinogram(f, DirectionSet::half_circle(8), 2.0 / 64);
  SECTION("rows cover the support and vanish beyond it") {
    REQUIRE(sino.offsetCount > 0);
    REQUIRE(std::abs(sino.at(0, 0)) < 1e-11);
    REQUIRE(std::abs(sino.at(0, sino.offsetCount - 1)) < 1e-11);
  }
  SECTION("CSV header and row count") {
    const std::string csv = sino.to_csv();
    REQUIRE(csv.rfind("theta,offset,value\n", 0) == 0);
    const size_t rows = static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n'));
    REQUIRE(rows == 1 + sino.angles.size() * static_cast<size_t>(sino.offsetCount));
  }
  SECTION("only two-dimensional fields are accepted") {
    const GridField f3({4, 4, 4}, {1, 1, 1}, std::vector<double>(64, 0.0));
    REQUIRE_THROWS_AS(make_sinogram(f3, DirectionSet::half_circle(4), 0.1), InvalidArgument);
  }
}

TEST_CASE("direction average matches per-point weighted line integrals") {
  // sigma = 0.05 keeps the phantom's tails below the support sentinel of the
  // trigonometric line integrator even after zero padding.
  const GridField padded = zero_pad_centered(pair_grid(64, 0.05), 2);
  const DirectionSet dirs = DirectionSet::half_circle(24);
  const double lineStep = 2.0 / 64;
  const GridField avg = direction_average(padded, dirs, lineStep);

  const int i = 64 + 7, j = 64 + 4;  // probe just off the padded-box center
  const std::vector<double> probe = {i * padded.spacing()[0], j * padded.spacing()[1]};
  double expected = 0.0;
  for (size_t d = 0; d < dirs.directions.size(); ++d) {
    LineSpec line;
    line.basePoint = probe;
    line.direction = dirs.directions[d];
    line.lmin = -0.75;
    line.lmax = 0.75;
    line.step = lineStep;
    expected += dirs.weights[d] * xray_forward(padded, line);
  }
  const int idx[2] = {i, j};
  REQUIRE(std::abs(avg.at(idx) - expected) < 2e-3);
}

TEST_CASE("direction average has Fourier symbol C / |k|") {
  // Generous padding: the averaged field decays only algebraically, so on a
  // tight torus its wrapped tails leak into the measured spectrum.
  const GridField padded = zero_pad_centered(pair_grid(64, 0.07), 4);  // box length 4
  const DirectionSet dirs = DirectionSet::half_circle(40);
  const GridField avg = direction_average(padded, dirs, 2.0 / 64);
  const double C = direction_average_constant(2).value();

  const auto& fs = padded.spectrum();
  const auto& as = avg.spectrum();
  double fmax = 0.0;
  for (const auto& c : fs) fmax = std::max(fmax, std::abs(c));
  // Off-axis modes only: the averaged field's wrapped tails produce a jump
  // across each torus face, and that seam leaks into the spectral axes
  // (alternating sign in m).  Away from the axis cross the discrete symbol
  // tracks C/|k| to about a tenth of the tolerance used here.
  const int N = 256;
  int checked = 0;
  for (int m1 = 2; m1 <= 4; ++m1) {
    for (int m2 = -4; m2 <= 4; ++m2) {
      if (std::abs(m2) < 2) continue;
      const size_t flat = static_cast<size_t>(m1) * N + static_cast<size_t>((m2 + N) % N);
      // Only well-populated modes: weak ones sit near the broadband
      // interpolation-noise floor where the ratio is meaningless.
      if (std::abs(fs[flat]) < 0.05 * fmax) continue;
      const double knorm = 0.5 * std::numbers::pi * std::sqrt(double(m1 * m1 + m2 * m2));
      const double ratio = std::abs(as[flat] / fs[flat]);
      REQUIRE(std::abs(ratio - C / knorm) < 1e-2 * (C / knorm));
      ++checked;
    }
  }
  REQUIRE(checked >= 8);
}

TEST_CASE("direction average is linear") {
  const GridField f = pair_grid(48, 0.07);
  const GridField g = zero_pad_centered(GaussianPair::centered(2, 1.0, 0.06, 0.1)
                                            .rotated(0.7, 1.0)
                                            .sample_to_grid({48, 48}, 1.0),
                                        1);
  const DirectionSet dirs = DirectionSet::half_circle(16);
  const double step = 2.0 / 48;
  const GridField lhs = direction_average(f.scaled(2.0).plus(g, -0.5), dirs, step);
  const GridField rhs =
      direction_average(f, dirs, step).scaled(2.0).plus(direction_average(g, dirs, step), -0.5);
  // Tolerance covers the interpolation noise of three independently
  // tabulated offset grids; weight or sign bugs would show up at O(1).
  REQUIRE(max_abs_diff(lhs, rhs) < 3e-2 * std::max(lhs.max_abs(), 1e-30));
}

TEST_CASE("exact inversion constants") {
  SECTION("half-integer gamma values") {
    REQUIRE(gamma_half(1) == PiRational{Rational(1), 1});       // Gamma(1/2) = sqrt(pi)
    REQUIRE(gamma_half(2) == PiRational{Rational(1), 0});       // Gamma(1) = 1
    REQUIRE(gamma_half(3) == PiRational{rat(1, 2), 1});         // Gamma(3/2) = sqrt(pi)/2
    REQUIRE(gamma_half(6) == PiRational{Rational(2), 0});       // Gamma(3) = 2
    REQUIRE_THROWS_AS(gamma_half(0), InvalidArgument);
  }
  SECTION("known planar values") {
    REQUIRE(direction_average_constant(2).value() == 2.0);
    REQUIRE(riesz_constant(2).value() == 0.5);
  }
  SECTION("forward and inverse constants are exact reciprocals") {
    for (int n = 2; n <= 8; ++n)
      REQUIRE((direction_average_constant(n) * riesz_constant(n)).is_one());
  }
  SECTION("PiRational arithmetic") {
    const PiRational a{rat(3, 2), 1};
    REQUIRE((a / a).is_one());
    REQUIRE((a * PiRational{rat(2, 3), -1}).is_one());
    REQUIRE(a.value() == Catch::Approx(1.5 * std::sqrt(std::numbers::pi)));
  }
}

TEST_CASE("riesz_inverse DC handling") {
  const GridField f = pair_grid(32);
  REQUIRE(std::abs(riesz_inverse(f, DcHandling::ZeroMean).mean()) < 1e-13);
  REQUIRE(riesz_inverse(f, DcHandling::ProvidedMean, 2.5).mean() ==
          Catch::Approx(2.5).margin(1e-12));
  const GridField f1({8}, {1.0}, std::vector<double>(8, 1.0));
  REQUIRE_THROWS_AS(riesz_inverse(f1), InvalidArgument);
}

TEST_CASE("zero padding and cropping") {
  const GridField f = pair_grid(16);
  SECTION("round trip restores the field bit for bit") {
    const GridField padded = zero_pad_centered(f, 3);
    REQUIRE(padded.shape() == std::vector<int>{48, 48});
    REQUIRE(padded.spacing() == f.spacing());
    REQUIRE(padded.boundary_max_abs() == 0.0);
    const GridField back = crop_center(padded, f.shape());
    REQUIRE(back.data() == f.data());
  }
  SECTION("factor one is the identity") {
    REQUIRE(zero_pad_centered(f, 1).data() == f.data());
  }
  SECTION("guards") {
    REQUIRE_THROWS_AS(zero_pad_centered(f, 0), InvalidArgument);
    REQUIRE_THROWS_AS(crop_center(f, {17, 16}), InvalidArgument);   // odd margin
    REQUIRE_THROWS_AS(crop_center(f, {32, 32}), InvalidArgument);   // larger than source
  }
}

TEST_CASE("end-to-end reconstruction") {
  SECTION("zero phantom reconstructs to a zero report") {
    const GridField zero({16, 16}, {1.0 / 16, 1.0 / 16}, std::vector<double>(256, 0.0));
    const auto [rec, report] = reconstruct(zero, DirectionSet::half_circle(8), 0.05);
    REQUIRE(rec.max_abs() == 0.0);
    REQUIRE(report.relL2Error == 0.0);
    REQUIRE(report.maxAbsError == 0.0);
    REQUIRE(report.numDirections == 8);
    REQUIRE(report.dcHandling == "zero_mean");
  }
  SECTION("support touching the box boundary is rejected") {
    const GridField wide = pair_grid(32, 0.3);
    REQUIRE_THROWS_AS(reconstruct(wide, DirectionSet::half_circle(8), 0.05), SupportClipped);
  }
  SECTION("rotating the phantom leaves the error budget unchanged") {
    const DirectionSet dirs = DirectionSet::half_circle(45);
    const double step = 2.0 / 64;
    const GridField a = pair_grid(64);
    const GridField b = pair_2d().rotated(std::numbers::pi / 6.0, 1.0)
                            .sample_to_grid({64, 64}, 1.0);
    const double ea = reconstruct(a, dirs, step, DcHandling::ZeroMean, 4).second.relL2Error;
    const double eb = reconstruct(b, dirs, step, DcHandling::ZeroMean, 4).second.relL2Error;
    REQUIRE(ea < 5e-2);
    REQUIRE(eb < 5e-2);
    REQUIRE(eb < 2.0 * ea);
    REQUIRE(ea < 2.0 * eb);
  }
  SECTION("report serialization") {
    ReconstructionReport rep;
    rep.gridShape = {64, 64};
    rep.numDirections = 45;
    rep.relL2Error = 0.25;
    rep.maxAbsError = 0.5;
    rep.dcHandling = "zero_mean";
    const nlohmann::json j = to_json(rep);
    REQUIRE(j.at("grid_shape") == std::vector<int>{64, 64});
    REQUIRE(j.at("num_directions") == 45);
    REQUIRE(j.at("rel_l2_error") == 0.25);
    REQUIRE(j.at("dc_handling") == "zero_mean");
  }
}

TEST_CASE("three-dimensional smoke study") {
  const GridField f = GaussianPair::centered(3, 1.0, 0.06, 0.2).sample_to_grid({32, 32, 32}, 1.0);
  const DirectionSet dirs = DirectionSet::hemisphere(6, 12);
  const auto [rec, report] = reconstruct(f, dirs, 2.0 / 32, DcHandling::ZeroMean, 2);
  REQUIRE(report.gridShape == std::vector<int>{32, 32, 32});
  REQUIRE(report.relL2Error < 0.5);
}
