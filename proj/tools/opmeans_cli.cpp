// Command-line front end: applies kernel means to stored fields, compares the
// operator routes against quadrature oracles, runs the radius-evolution
// residual check, and drives the line-transform reconstruction study.  Each run
// prints a JSON provenance record (command, version, full parameter set) to
// stdout; data products go to GRDF/CSV/JSON files for external plotting.
//
// Exit codes: 0 success, 1 numerical tolerance breach, 2 usage/format error.

#include <opmeans/opmeans.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using ojson = nlohmann::ordered_json;
using namespace opmeans;

// Fixed-format doubles for CSV output: full round-trip precision, and the
// same bytes on every rerun of the same build.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

EvalMode parse_mode(const std::string& mode) {
  if (mode == "series") return EvalMode::Series;
  if (mode == "spectral") return EvalMode::Spectral;
  throw InvalidArgument("unknown mode '" + mode + "' (expected series|spectral)");
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string(what) + ": cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw InvalidArgument(std::string(what) + ": empty list");
  return out;
}

ojson provenance(const std::string& command) {
  ojson p;
  p["command"] = command;
  p["version"] = version_string;
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw FormatError("write failure on " + path);
}

// GRDF write with the mandatory read-back check: what landed on disk decodes
// to exactly the samples we hold.
void write_grdf_verified(const GridField& f, const std::string& path) {
  write_grdf(f, path);
  const GridField back = read_grdf(path);
  if (!back.same_layout(f) || back.data() != f.data())
    throw Error("GRDF round-trip mismatch on " + path);
}

// ---------------------------------------------------------------------------
// mean: apply a kernel-mean operator (any real power) to a stored field.
// GRDF input -> GRDF output; PolyField JSON input -> JSON output.
// ---------------------------------------------------------------------------
struct MeanArgs {
  std::string kernel = "sphere";
  double alpha = 1.0;
  double radius = 0.5;
  double power = 1.0;
  std::string mode = "series";
  int order = 8;
  int dim = 0;  // optional cross-check against the input file
  std::string in;
  std::string out;
};

int cmd_mean(const MeanArgs& a) {
  const MeanSpec spec{kernel_from_name(a.kernel, a.alpha), a.radius, a.power,
                      parse_mode(a.mode), a.order};
  ojson prov = provenance("mean");
  prov["parameters"] = {{"kernel", a.kernel},   {"alpha", a.alpha}, {"radius", a.radius},
                        {"power", a.power},     {"mode", a.mode},   {"order", a.order},
                        {"dim", a.dim},         {"input", a.in},    {"output", a.out}};

  if (a.in.ends_with(".json")) {
    std::ifstream in(a.in);
    if (!in) throw FormatError("cannot open " + a.in);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("polynomial input is not valid JSON: ") + e.what());
    }
    const PolyField f = PolyField::from_json(j);
    if (a.dim != 0 && a.dim != f.dim())
      throw InvalidArgument("--dim does not match the input field dimension");
    const PolyField g = mean(f, spec);
    write_text(a.out, g.to_json().dump(2) + "\n");
    prov["field"] = {{"type", "poly"}, {"dim", f.dim()}, {"input_terms", f.terms().size()},
                     {"output_terms", g.terms().size()}};
    prov["result"] = {{"output_total_degree", g.total_degree()}};
  } else {
    const GridField f = read_grdf(a.in);
    if (a.dim != 0 && a.dim != f.dim())
      throw InvalidArgument("--dim does not match the input field dimension");
    const GridField g = mean(f, spec);
    write_grdf_verified(g, a.out);
    prov["field"] = {{"type", "grid"}, {"dim", f.dim()}, {"shape", f.shape()}};
    prov["result"] = {{"input_mean", f.mean()},
                      {"output_mean", g.mean()},
                      {"output_mean_square", g.mean_square()}};
  }
  std::cout << prov.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare-oracle: grid-operator route vs direct quadrature on the analytic
// field behind the grid, over a radius sweep at a fixed probe point.
// ---------------------------------------------------------------------------
struct CompareArgs {
  int dim = 1;
  int grid = 64;
  double box = 2.0 * std::numbers::pi;
  int waves = 6;
  int maxMode = 3;
  uint64_t seed = 2024;
  std::string kernel = "sphere";
  double alpha = 1.0;
  std::string radii = "0.1,0.2,0.3,0.4,0.5";
  std::string mode = "spectral";
  int order = 8;
  double tol = 1e-7;
  std::string out = "compare.csv";
  int muNodes = 24;
  int phiPoints = 48;
  int radialNodes = 256;
  int mcSamples = 8192;
};

int cmd_compare_oracle(const CompareArgs& a) {
  if (a.dim < 1 || a.dim > 3)
    throw InvalidArgument("compare-oracle: --dim must be 1, 2, or 3");
  const KernelSpec kernel = kernel_from_name(a.kernel, a.alpha);
  const EvalMode mode = parse_mode(a.mode);
  const std::vector<double> radii = parse_double_list(a.radii, "--radii");
  for (double r : radii)
    if (!(r > 0.0)) throw InvalidArgument("--radii: radii must be positive");

  const CosineSum field = CosineSum::random(a.dim, a.box, a.maxMode, a.waves, a.seed);
  const GridField grid = field.sample_to_grid(std::vector<int>(a.dim, a.grid), a.box);

  QuadratureRule rule;
  rule.muNodes = a.muNodes;
  rule.phiPoints = a.phiPoints;
  rule.radialNodes = a.radialNodes;
  rule.mcSamples = a.mcSamples;

  std::vector<double> probe(static_cast<size_t>(a.dim));
  for (int i = 0; i < a.dim; ++i) probe[static_cast<size_t>(i)] = a.box * (0.31 + 0.07 * i);

  std::string csv = "r,operator_value,oracle_value,abs_diff\n";
  double maxDiff = 0.0;
  for (double r : radii) {
    const MeanSpec spec{kernel, r, 1.0, mode, a.order};
    const double op = mean(grid, spec).evaluate(probe);
    const double oracle = kernel_mean_quadrature(field, probe, r, kernel, rule);
    const double diff = std::abs(op - oracle);
    maxDiff = std::max(maxDiff, diff);
    csv += num(r) + "," + num(op) + "," + num(oracle) + "," + num(diff) + "\n";
  }
  write_text(a.out, csv);

  const bool pass = maxDiff < a.tol;
  ojson prov = provenance("compare-oracle");
  prov["parameters"] = {{"dim", a.dim},       {"grid", a.grid},     {"box", a.box},
                        {"waves", a.waves},   {"max_mode", a.maxMode}, {"seed", a.seed},
                        {"kernel", a.kernel}, {"alpha", a.alpha},   {"radii", a.radii},
                        {"mode", a.mode},     {"order", a.order},   {"tol", a.tol},
                        {"output", a.out}};
  prov["result"] = {{"rows", radii.size()}, {"max_abs_diff", maxDiff}, {"pass", pass}};
  std::cout << prov.dump(2) << "\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// pde: radius-evolution residual of a plane wave under step refinement.
// ---------------------------------------------------------------------------
struct PdeArgs {
  std::string kernel = "sphere";
  double alpha = 1.0;
  double radius = 1.0;
  double step = 0.05;
  int levels = 3;
  std::string mode = "series";
  int order = 12;
  std::string wavevector = "1.1,0.4";
  double amplitude = 1.0;
  double phase = 0.3;
  std::string out;
};

int cmd_pde(const PdeArgs& a) {
  const KernelSpec kernel = kernel_from_name(a.kernel, a.alpha);
  const EvalMode mode = parse_mode(a.mode);
  if (a.levels < 1) throw InvalidArgument("pde: --levels must be >= 1");
  const PlaneWaveField f(parse_double_list(a.wavevector, "--wavevector"), a.amplitude,
                         a.phase);

  ojson prov = provenance("pde");
  prov["parameters"] = {{"kernel", a.kernel},   {"alpha", a.alpha},
                        {"radius", a.radius},   {"step", a.step},
                        {"levels", a.levels},   {"mode", a.mode},
                        {"order", a.order},     {"wavevector", a.wavevector},
                        {"amplitude", a.amplitude}, {"phase", a.phase}};

  ojson table = ojson::array();
  std::vector<double> norms;
  double h = a.step;
  for (int i = 0; i < a.levels; ++i, h *= 0.5) {
    const ResidualReport rep = radius_evolution_residual(f, kernel, a.radius, h, mode, a.order);
    norms.push_back(rep.residualNorm);
    table.push_back(ojson(to_json(rep)));
  }
  ojson ratios = ojson::array();
  for (size_t i = 0; i + 1 < norms.size(); ++i)
    ratios.push_back(norms[i + 1] > 0.0 ? norms[i] / norms[i + 1] : 0.0);
  prov["report"] = {{"coefficient", radius_evolution_coefficient(kernel, f.dim())},
                    {"table", table},
                    {"step_halving_ratios", ratios}};
  const std::string text = prov.dump(2) + "\n";
  if (!a.out.empty()) write_text(a.out, text);
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------------------
// xray: sample the two-Gaussian phantom, run the direction-averaged line
// transform and its inversion, write artifacts, report the errors.
// ---------------------------------------------------------------------------
struct XrayArgs {
  int grid = 128;
  double box = 1.0;
  int directions = 90;
  double lineStep = 0.0;  // 0 = half the grid spacing
  double sigma = 0.04;
  double separation = 0.15;
  double amplitude = 1.0;
  std::string dc = "zero_mean";
  int pad = 4;
  std::string recon = "recon.grdf";
  std::string phantomOut;
  std::string sinogramOut;
};

int cmd_xray(const XrayArgs& a) {
  if (a.grid < 8) throw InvalidArgument("xray: --grid must be >= 8");
  DcHandling dc;
  if (a.dc == "zero_mean") dc = DcHandling::ZeroMean;
  else if (a.dc == "provided_mean") dc = DcHandling::ProvidedMean;
  else throw InvalidArgument("xray: --dc must be zero_mean|provided_mean");

  GaussianPair pair = GaussianPair::centered(2, a.box, a.sigma, a.separation);
  pair.amplitude = a.amplitude;
  const GridField phantom = pair.sample_to_grid({a.grid, a.grid}, a.box);
  const DirectionSet dirs = DirectionSet::half_circle(a.directions);
  const double lineStep = (a.lineStep > 0.0) ? a.lineStep : 0.5 * a.box / a.grid;

  const auto [rec, report] = reconstruct(phantom, dirs, lineStep, dc, a.pad);
  write_grdf_verified(rec, a.recon);
  if (!a.phantomOut.empty()) write_grdf_verified(phantom, a.phantomOut);
  if (!a.sinogramOut.empty())
    write_text(a.sinogramOut, make_sinogram(phantom, dirs, lineStep).to_csv());

  ojson prov = provenance("xray");
  prov["parameters"] = {{"grid", a.grid},          {"box", a.box},
                        {"directions", a.directions}, {"line_step", lineStep},
                        {"sigma", a.sigma},        {"separation", a.separation},
                        {"amplitude", a.amplitude}, {"dc", a.dc},
                        {"pad", a.pad},
                        {"recon", a.recon},        {"phantom_out", a.phantomOut},
                        {"sinogram_out", a.sinogramOut}};
  prov["report"] = ojson(to_json(report));
  std::cout << prov.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fractional-figure: fractional powers of the spherical mean on a 1D field,
// tabulated as CSV for plotting.
// ---------------------------------------------------------------------------
struct FracArgs {
  int grid = 64;
  double box = 2.0 * std::numbers::pi;
  double radius = 0.4;
  std::string mode = "spectral";
  int order = 12;
  std::string out = "fractional_means.csv";
};

int cmd_fractional_figure(const FracArgs& a) {
  const EvalMode mode = parse_mode(a.mode);
  // Two harmonics keep the grid band at |k| = 3: every r below pi/6 stays
  // clear of the cosine symbol's first zero, so fractional powers are safe.
  const GridField f = GridField::sample(
      {a.grid}, {a.box / a.grid}, [](std::span<const double> x) {
        return std::cos(x[0]) + 0.3 * std::cos(3.0 * x[0]);
      });
  const KernelSpec sphere = KernelSpec::sphere();
  const auto at = [&](double power) {
    return mean(f, MeanSpec{sphere, a.radius, power, mode, a.order});
  };
  const GridField half = at(0.5);
  const GridField third = at(1.0 / 3.0);
  const GridField twoThirds = at(2.0 / 3.0);
  const GridField full = at(1.0);

  std::string csv = "x,f,mean_half,mean_third,mean_two_thirds,mean_full\n";
  for (int i = 0; i < a.grid; ++i) {
    const double x = i * (a.box / a.grid);
    const size_t j = static_cast<size_t>(i);
    csv += num(x) + "," + num(f.data()[j]) + "," + num(half.data()[j]) + "," +
           num(third.data()[j]) + "," + num(twoThirds.data()[j]) + "," +
           num(full.data()[j]) + "\n";
  }
  write_text(a.out, csv);

  ojson prov = provenance("fractional-figure");
  prov["parameters"] = {{"grid", a.grid}, {"box", a.box},     {"radius", a.radius},
                        {"mode", a.mode}, {"order", a.order}, {"output", a.out}};
  prov["result"] = {{"rows", a.grid}};
  std::cout << prov.dump(2) << "\n";
  return 0;
}

int error_exit(const char* type, const std::string& message) {
  ojson e;
  e["error"] = {{"type", type}, {"message", message}};
  std::cerr << e.dump() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-calculus kernel means: apply, cross-check, and invert"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap on worker threads (default: OPMEANS_THREADS or hardware)");

  MeanArgs meanArgs;
  CLI::App* meanCmd = app.add_subcommand("mean", "apply a kernel-mean operator to a field file");
  meanCmd->add_option("--kernel", meanArgs.kernel, "sphere|ball|bell|tri");
  meanCmd->add_option("--alpha", meanArgs.alpha, "profile exponent for bell/tri");
  meanCmd->add_option("--radius", meanArgs.radius, "kernel radius");
  meanCmd->add_option("--power", meanArgs.power, "operator power (1 forward, -1 inverse, fractional allowed)");
  meanCmd->add_option("--mode", meanArgs.mode, "series|spectral");
  meanCmd->add_option("--order", meanArgs.order, "series truncation order");
  meanCmd->add_option("--dim", meanArgs.dim, "expected dimension (cross-check)");
  meanCmd->add_option("-i,--input", meanArgs.in, "input field (.grdf binary or .json polynomial)")
      ->required();
  meanCmd->add_option("-o,--output", meanArgs.out, "output field path")->required();

  CompareArgs cmpArgs;
  CLI::App* cmpCmd = app.add_subcommand("compare-oracle",
                                        "operator route vs quadrature oracle on a random band-limited field");
  cmpCmd->add_option("--dim", cmpArgs.dim, "field dimension (1-3)");
  cmpCmd->add_option("--grid", cmpArgs.grid, "grid points per axis");
  cmpCmd->add_option("--box", cmpArgs.box, "box length");
  cmpCmd->add_option("--waves", cmpArgs.waves, "number of random waves");
  cmpCmd->add_option("--max-mode", cmpArgs.maxMode, "largest integer mode per axis");
  cmpCmd->add_option("--seed", cmpArgs.seed, "RNG seed for the wave draw");
  cmpCmd->add_option("--kernel", cmpArgs.kernel, "sphere|ball|bell|tri");
  cmpCmd->add_option("--alpha", cmpArgs.alpha, "profile exponent for bell/tri");
  cmpCmd->add_option("--radii", cmpArgs.radii, "comma-separated radius sweep");
  cmpCmd->add_option("--mode", cmpArgs.mode, "series|spectral");
  cmpCmd->add_option("--order", cmpArgs.order, "series truncation order");
  cmpCmd->add_option("--tol", cmpArgs.tol, "max |diff| for exit code 0");
  cmpCmd->add_option("-o,--output", cmpArgs.out, "CSV report path");
  cmpCmd->add_option("--mu-nodes", cmpArgs.muNodes, "polar nodes of the 3D sphere rule");
  cmpCmd->add_option("--phi-points", cmpArgs.phiPoints, "azimuthal points of the 3D sphere rule");
  cmpCmd->add_option("--radial-nodes", cmpArgs.radialNodes, "radial nodes of the kernel rule");

  PdeArgs pdeArgs;
  CLI::App* pdeCmd = app.add_subcommand("pde", "radius-evolution residual under step refinement");
  pdeCmd->add_option("--kernel", pdeArgs.kernel, "sphere|ball|bell");
  pdeCmd->add_option("--alpha", pdeArgs.alpha, "profile exponent for bell");
  pdeCmd->add_option("--radius", pdeArgs.radius, "radius at which the residual is evaluated");
  pdeCmd->add_option("--step", pdeArgs.step, "coarsest radial step");
  pdeCmd->add_option("--levels", pdeArgs.levels, "number of halvings to tabulate");
  pdeCmd->add_option("--mode", pdeArgs.mode, "series|spectral");
  pdeCmd->add_option("--order", pdeArgs.order, "series truncation order");
  pdeCmd->add_option("--wavevector", pdeArgs.wavevector, "comma-separated plane-wave vector");
  pdeCmd->add_option("--amplitude", pdeArgs.amplitude, "plane-wave amplitude");
  pdeCmd->add_option("--phase", pdeArgs.phase, "plane-wave phase");
  pdeCmd->add_option("-o,--output", pdeArgs.out, "also write the JSON report here");

  XrayArgs xrayArgs;
  CLI::App* xrayCmd = app.add_subcommand("xray", "direction-averaged line transform and inversion study");
  xrayCmd->add_option("--grid", xrayArgs.grid, "grid points per axis");
  xrayCmd->add_option("--box", xrayArgs.box, "box length");
  xrayCmd->add_option("--directions", xrayArgs.directions, "number of directions on the half circle");
  xrayCmd->add_option("--line-step", xrayArgs.lineStep, "sample step along lines (0 = half spacing)");
  xrayCmd->add_option("--sigma", xrayArgs.sigma, "phantom Gaussian width");
  xrayCmd->add_option("--separation", xrayArgs.separation, "phantom center separation");
  xrayCmd->add_option("--amplitude", xrayArgs.amplitude, "phantom amplitude (0 = zero field)");
  xrayCmd->add_option("--dc", xrayArgs.dc, "zero_mean|provided_mean");
  xrayCmd->add_option("--pad", xrayArgs.pad, "zero-padding factor for the inversion");
  xrayCmd->add_option("-o,--recon", xrayArgs.recon, "reconstruction GRDF path");
  xrayCmd->add_option("--phantom-out", xrayArgs.phantomOut, "also write the phantom GRDF here");
  xrayCmd->add_option("--sinogram-out", xrayArgs.sinogramOut, "also write the sinogram CSV here");

  FracArgs fracArgs;
  CLI::App* fracCmd = app.add_subcommand("fractional-figure",
                                         "fractional spherical means of a 1D field as CSV");
  fracCmd->add_option("--grid", fracArgs.grid, "grid points");
  fracCmd->add_option("--box", fracArgs.box, "box length");
  fracCmd->add_option("--radius", fracArgs.radius, "mean radius");
  fracCmd->add_option("--mode", fracArgs.mode, "series|spectral");
  fracCmd->add_option("--order", fracArgs.order, "series truncation order");
  fracCmd->add_option("-o,--output", fracArgs.out, "CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::stringstream msg;
    app.exit(e, msg, msg);
    return error_exit("usage", msg.str());
  }

  try {
    if (threads > 0) thread_budget() = threads;
    if (meanCmd->parsed()) return cmd_mean(meanArgs);
    if (cmpCmd->parsed()) return cmd_compare_oracle(cmpArgs);
    if (pdeCmd->parsed()) return cmd_pde(pdeArgs);
    if (xrayCmd->parsed()) return cmd_xray(xrayArgs);
    if (fracCmd->parsed()) return cmd_fractional_figure(fracArgs);
    return error_exit("usage", "no subcommand given");
  } catch (const FormatError& e) {
    return error_exit("format", e.what());
  } catch (const InvalidArgument& e) {
    return error_exit("invalid_argument", e.what());
  } catch (const BandLimitExceeded& e) {
    return error_exit("band_limit", e.what());
  } catch (const MultiplierSingular& e) {
    return error_exit("singular_multiplier", e.what());
  } catch (const Error& e) {
    return error_exit("error", e.what());
  } catch (const std::exception& e) {
    return error_exit("internal", e.what());
  }
}
