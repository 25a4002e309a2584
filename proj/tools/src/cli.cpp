#include "dipolefield_cli/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "dipolefield/compare.hpp"
#include "dipolefield/errors.hpp"
#include "dipolefield/geometry.hpp"
#include "dipolefield/io.hpp"
#include "dipolefield/limit_dist.hpp"
#include "dipolefield/montecarlo.hpp"

namespace dipolefield::cli {
namespace {

namespace fs = std::filesystem;

/// Bad flag value found after CLI11 accepted the syntax.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string mode = "parallel";
  std::vector<double> epsilon{0.0};
  std::uint64_t n_dipoles = 10000;
  std::uint64_t realizations = 200000;
  std::uint64_t seed = 1;
  std::string grid;
  std::string bins;
  double tol = 1e-8;
  std::string out;
  std::string format = "csv";
  double threshold = 5.0;
  std::string chi2_band = "0.8:1.3";
  double min_expected = 10.0;
  unsigned workers = 0;
  std::string histogram;
  std::string curve;
  std::string report;
};

std::string num(double v, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  return parts;
}

double to_double(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw UsageError(flag + ": '" + text + "' is not a finite number");
  }
  return v;
}

/// "min:max:count" for --grid and --bins.
struct Triple {
  double min;
  double max;
  std::size_t count;
};

Triple parse_triple(const std::string& text, const std::string& flag, std::size_t min_count) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError(flag + ": expected min:max:count, got '" + text + "'");
  Triple t{to_double(parts[0], flag), to_double(parts[1], flag), 0};
  const double count = to_double(parts[2], flag);
  if (!(t.min < t.max)) throw UsageError(flag + ": min must be below max");
  if (count != std::floor(count) || count < static_cast<double>(min_count) || count > 1e8) {
    throw UsageError(flag + ": count must be an integer in [" + std::to_string(min_count) + ", 1e8]");
  }
  t.count = static_cast<std::size_t>(count);
  return t;
}

io::FileFormat format_of(const Settings& s) { return io::parse_file_format(s.format); }

std::string extension(io::FileFormat f) { return f == io::FileFormat::kCsv ? ".csv" : ".json"; }

std::string eps_label(double eps) { return num(eps, 10); }

/// --out (flag or config file), then the environment, then the working directory.
fs::path output_dir(const Settings& s) {
  if (!s.out.empty()) return s.out;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

bool output_dir_configured(const Settings& s) {
  const char* env = std::getenv(kOutputDirEnv);
  return !s.out.empty() || (env != nullptr && *env != '\0');
}

int cmd_constants(const Settings& s, std::ostream& out) {
  const auto mode = parse_orientation_mode(s.mode);
  const auto t = constants_table(mode);
  const auto format = format_of(s);
  std::ostringstream os;
  if (format == io::FileFormat::kJson) {
    os << "{\n \"kind\": \"constants\",\n \"mode\": \"" << to_string(mode) << "\",\n"
       << " \"d_infinity\": " << num(t.d_infinity) << ",\n"
       << " \"half_width\": " << num(t.half_width) << ",\n"
       << " \"shift\": " << num(t.shift) << ",\n"
       << " \"shift_closed_form\": " << (std::isnan(t.shift_closed_form) ? "null" : num(t.shift_closed_form)) << ",\n"
       << " \"width_coefficient\": " << num(t.width_coefficient) << ",\n"
       << " \"center_coefficient\": " << num(t.center_coefficient) << "\n}\n";
  } else {
    os << "# dipolefield constants\n# mode=" << to_string(mode) << "\n"
       << "# coefficients multiply C rho (F0 = C 4 pi rho / 3)\n"
       << "key,value\n"
       << "d_infinity," << num(t.d_infinity) << "\n"
       << "half_width," << num(t.half_width) << "\n"
       << "shift," << num(t.shift) << "\n"
       << "shift_closed_form," << (std::isnan(t.shift_closed_form) ? "" : num(t.shift_closed_form)) << "\n"
       << "width_coefficient," << num(t.width_coefficient) << "\n"
       << "center_coefficient," << num(t.center_coefficient) << "\n";
  }
  out << os.str();
  if (output_dir_configured(s)) {
    const auto path = output_dir(s) / ("constants_" + std::string(to_string(mode)) + extension(format));
    io::write_file_atomic(path, os.str());
  }
  return kOk;
}

int cmd_analytic(const Settings& s, std::ostream& out) {
  const auto mode = parse_orientation_mode(s.mode);
  const auto format = format_of(s);
  std::optional<Triple> grid;
  if (!s.grid.empty()) grid = parse_triple(s.grid, "--grid", 2);
  InversionOptions opt;
  opt.tolerance = s.tol;
  for (double eps : s.epsilon) {
    const UniformGrid g = grid ? UniformGrid{grid->min, grid->max, grid->count} : default_curve_grid(mode, eps);
    const auto curve = analytic_curve(mode, eps, g, opt);
    const auto path = output_dir(s) / ("curve_" + std::string(to_string(mode)) + "_eps" + eps_label(eps) + extension(format));
    io::write_file_atomic(path, io::format_curve(curve, format));
    out << "wrote " << path.string() << " (" << curve.meta.source << ", peak " << num(curve.peak_height(), 6) << " at g="
        << num(curve.peak_location(), 6) << ")\n";
  }
  return kOk;
}

int cmd_simulate(const Settings& s, std::ostream& out) {
  const auto mode = parse_orientation_mode(s.mode);
  const auto format = format_of(s);
  std::optional<Triple> bins;
  if (!s.bins.empty()) bins = parse_triple(s.bins, "--bins", 2);
  RunOptions opt;
  opt.workers = s.workers;
  for (double eps : s.epsilon) {
    SimulationSpec spec;
    spec.n_dipoles = s.n_dipoles;
    spec.realizations = s.realizations;
    spec.epsilon = eps;
    spec.mode = mode;
    spec.seed = s.seed;
    spec.binning = bins ? Binning{bins->min, bins->max, bins->count} : default_binning(mode, eps);
    const auto hist = run_simulation(spec, opt);
    const auto path = output_dir(s) / ("hist_" + std::string(to_string(mode)) + "_eps" + eps_label(eps) + extension(format));
    io::write_file_atomic(path, io::format_histogram(hist, format));
    out << "wrote " << path.string() << " (seed=" << spec.seed << ", N=" << spec.n_dipoles << ", M=" << spec.realizations
        << ", underflow=" << hist.underflow << ", overflow=" << hist.overflow << ")\n";
  }
  return kOk;
}

int cmd_compare(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto format = format_of(s);
  const auto hist = io::parse_histogram(io::read_file(s.histogram));
  const auto curve = io::parse_curve(io::read_file(s.curve));
  if (hist.meta.mode != curve.meta.mode || hist.meta.epsilon != curve.meta.epsilon) {
    err << "warning: histogram (" << to_string(hist.meta.mode) << ", eps=" << eps_label(hist.meta.epsilon)
        << ") and curve (" << to_string(curve.meta.mode) << ", eps=" << eps_label(curve.meta.epsilon) << ") differ\n";
  }
  CompareOptions opt;
  opt.max_z = s.threshold;
  const auto band = split(s.chi2_band, ':');
  if (band.size() != 2) throw UsageError("--chi2-band: expected low:high, got '" + s.chi2_band + "'");
  opt.chi2_per_dof_low = to_double(band[0], "--chi2-band");
  opt.chi2_per_dof_high = to_double(band[1], "--chi2-band");
  if (!(opt.chi2_per_dof_low < opt.chi2_per_dof_high)) throw UsageError("--chi2-band: low must be below high");
  opt.min_expected = s.min_expected;
  const auto report = compare(hist, curve, opt);
  const auto text = io::format_report(report, format);
  out << text;
  if (!s.report.empty()) io::write_file_atomic(s.report, text);
  return report.pass ? kOk : kComparisonFailed;
}

void add_mode(CLI::App* app, Settings& s) {
  app->add_option("--mode", s.mode, "Dipole orientation: parallel or random")
      ->check(CLI::IsMember({"parallel", "random"}))
      ->capture_default_str();
}

void add_format(CLI::App* app, Settings& s) {
  app->add_option("--format", s.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_epsilon(CLI::App* app, Settings& s) {
  app->add_option("--epsilon", s.epsilon, "Excluded volumes, comma separated, each in [0, 1e6]")
      ->delimiter(',')
      ->check(CLI::Range(0.0, kMaxExcludedVolume))
      ->capture_default_str();
}

void add_out(CLI::App* app, Settings& s) {
  app->add_option("--out", s.out,
                  std::string("Output directory (default: $") + kOutputDirEnv + ", else the working directory)");
}

}  // namespace

ConstantsTable constants_table(OrientationMode mode) {
  ConstantsTable t;
  t.mode = mode;
  t.d_infinity = d_infinity(mode);
  t.half_width = std::numbers::pi * t.d_infinity;
  t.shift = shift_constant(geometry_for(mode));
  t.shift_closed_form =
      mode == OrientationMode::kParallelZ ? shift_constant_parallel_closed_form() : 0.0;
  const double f0 = field_scale(1.0, 1.0);
  t.width_coefficient = t.half_width * f0;
  t.center_coefficient = t.shift * f0;
  return t;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Distribution of the field from randomly placed dipoles", "dipolefield"};
  app.set_config("--config", "", "TOML or INI file with option values; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough(false);

  auto* constants = app.add_subcommand("constants", "Print D_inf, half width, shift constant and field coefficients");
  add_mode(constants, s);
  add_format(constants, s);
  add_out(constants, s);

  auto* analytic = app.add_subcommand("analytic", "Write limit distributions for each excluded volume");
  add_mode(analytic, s);
  add_epsilon(analytic, s);
  analytic->add_option("--grid", s.grid, "Field grid min:max:points (default depends on mode and epsilon)");
  analytic->add_option("--tol", s.tol, "Absolute tolerance of the inverted density")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_out(analytic, s);
  add_format(analytic, s);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo histograms for each excluded volume");
  add_mode(simulate, s);
  add_epsilon(simulate, s);
  simulate->add_option("--n-dipoles", s.n_dipoles, "Dipoles per realization")
      ->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()))
      ->capture_default_str();
  simulate->add_option("--realizations", s.realizations, "Number of realizations")
      ->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()))
      ->capture_default_str();
  simulate->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  simulate->add_option("--bins", s.bins, "Histogram bins min:max:count (default depends on mode and epsilon)");
  simulate->add_option("--workers", s.workers, "Worker threads, 0 for one per core")->capture_default_str();
  add_out(simulate, s);
  add_format(simulate, s);

  auto* comparison = app.add_subcommand("compare", "Compare a histogram file with a curve file");
  comparison->add_option("--histogram,histogram", s.histogram, "Histogram file")->required()->check(CLI::ExistingFile);
  comparison->add_option("--curve,curve", s.curve, "Curve file")->required()->check(CLI::ExistingFile);
  comparison->add_option("--threshold", s.threshold, "Largest acceptable per-bin z-score")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  comparison->add_option("--chi2-band", s.chi2_band, "Acceptable chi2/dof range low:high")->capture_default_str();
  comparison->add_option("--min-expected", s.min_expected, "Bins with fewer expected counts are excluded")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  comparison->add_option("--report", s.report, "Also write the report to this file");
  add_format(comparison, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (constants->parsed()) return cmd_constants(s, out);
    if (analytic->parsed()) return cmd_analytic(s, out);
    if (simulate->parsed()) return cmd_simulate(s, out);
    return cmd_compare(s, out, err);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << " (estimate " << num(e.estimate(), 6) << ", error "
        << num(e.error_estimate(), 3) << ")\n";
    return kNumericalError;
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace dipolefield::cli
