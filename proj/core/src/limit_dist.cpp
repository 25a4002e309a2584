#include "dipolefield/limit_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dipolefield/errors.hpp"
#include "dipolefield/quadrature.hpp"

namespace dipolefield {
namespace {

constexpr double kPi = std::numbers::pi;

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || epsilon > kMaxExcludedVolume) {
    throw DomainError("excluded volume epsilon must lie in (0, 1e6], got " + std::to_string(epsilon));
  }
}

double gaussian_tail_mass(double x, double sigma) {  // P(|G| > x)
  return std::erfc(x / (sigma * std::numbers::sqrt2));
}

}  // namespace

void UniformGrid::validate() const {
  if (!(std::isfinite(min) && std::isfinite(max) && min < max)) {
    throw DomainError("grid requires finite min < max");
  }
  if (points < 2) throw DomainError("grid requires at least 2 points");
}

double DistributionCurve::interpolate(double g) const noexcept {
  if (density.empty() || g < grid.min || g > grid.max) return 0.0;
  const double h = grid.step();
  const double t = (g - grid.min) / h;
  auto i = static_cast<std::size_t>(t);
  if (i >= density.size() - 1) return density.back();
  const double frac = t - static_cast<double>(i);
  return density[i] + frac * (density[i + 1] - density[i]);
}

double DistributionCurve::integrate(double a, double b) const noexcept {
  a = std::max(a, grid.min);
  b = std::min(b, grid.max);
  if (!(b > a) || density.size() < 2) return 0.0;
  const double h = grid.step();
  const std::size_t last = density.size() - 1;
  auto cell = [&](double x) { return std::min<std::size_t>(static_cast<std::size_t>((x - grid.min) / h), last - 1); };
  const std::size_t ia = cell(a);
  const std::size_t ib = cell(b);
  auto piece = [&](double lo, double hi) {
    return 0.5 * (interpolate(lo) + interpolate(hi)) * (hi - lo);
  };
  if (ia == ib) return piece(a, b);
  double sum = piece(a, grid.at(ia + 1));
  for (std::size_t i = ia + 1; i < ib; ++i) sum += 0.5 * (density[i] + density[i + 1]) * h;
  sum += piece(grid.at(ib), b);
  return sum;
}

double DistributionCurve::trapezoid_mass() const noexcept {
  if (density.size() < 2) return 0.0;
  double s = 0.5 * (density.front() + density.back());
  for (std::size_t i = 1; i + 1 < density.size(); ++i) s += density[i];
  return s * grid.step();
}

double DistributionCurve::mean() const noexcept {
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double w = (i == 0 || i + 1 == density.size()) ? 0.5 : 1.0;
    m0 += w * density[i];
    m1 += w * density[i] * grid.at(i);
  }
  return m0 > 0.0 ? m1 / m0 : 0.0;
}

double DistributionCurve::variance() const noexcept {
  const double mu = mean();
  double m0 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double w = (i == 0 || i + 1 == density.size()) ? 0.5 : 1.0;
    const double dg = grid.at(i) - mu;
    m0 += w * density[i];
    m2 += w * density[i] * dg * dg;
  }
  return m0 > 0.0 ? m2 / m0 : 0.0;
}

double DistributionCurve::peak_height() const noexcept {
  return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end());
}

double DistributionCurve::peak_location() const noexcept {
  if (density.empty()) return 0.0;
  const auto it = std::max_element(density.begin(), density.end());
  return grid.at(static_cast<std::size_t>(it - density.begin()));
}

double Lorentzian::density(double g) const noexcept {
  const double x = g - center;
  return half_width / (kPi * (half_width * half_width + x * x));
}

double Lorentzian::cdf(double g) const noexcept { return 0.5 + std::atan((g - center) / half_width) / kPi; }

Lorentzian lorentzian_parameters(OrientationMode mode) {
  return {shift_for(mode), kPi * d_infinity(mode)};
}

UniformGrid default_curve_grid(OrientationMode mode) {
  const auto l = lorentzian_parameters(mode);
  return {l.center - 12.0 * l.half_width, l.center + 12.0 * l.half_width, 2048};
}

UniformGrid default_curve_grid(OrientationMode mode, double epsilon) {
  if (epsilon == 0.0) return default_curve_grid(mode);
  require_epsilon(epsilon);
  const auto wide = default_curve_grid(mode);
  const double half = std::min(std::max(std::abs(wide.min), std::abs(wide.max)),
                               10.0 * std::sqrt(angular_second_moment(mode) / epsilon));
  return {-half, half, 2048};
}

DistributionCurve lorentzian_limit(OrientationMode mode, const UniformGrid& grid) {
  grid.validate();
  const auto l = lorentzian_parameters(mode);
  DistributionCurve c{grid, std::vector<double>(grid.points), {mode, 0.0, 0.0, "lorentzian"}};
  for (std::size_t i = 0; i < grid.points; ++i) c.density[i] = l.density(grid.at(i));
  return c;
}

Complex charfn_limit(double k, OrientationMode mode) {
  const double width = kPi * d_infinity(mode);
  return std::exp(Complex(-width * std::abs(k), -shift_for(mode) * k));
}

Complex charfn_excluded(double k, double epsilon, OrientationMode mode) {
  require_epsilon(epsilon);
  // log p(eps, k) = -pi D|k| - i g_c k - eps (p11(k/eps) - 1) = -eps E(k/eps)
  // with E the excess of p11 over its linear terms, so the two linear parts
  // cancel analytically rather than numerically.
  const double tol = 1e-11 / std::max(1.0, epsilon);
  return std::exp(-epsilon * charfn_single_excess(k / epsilon, geometry_for(mode), tol));
}

CharFnModel limit_charfn(OrientationMode mode) {
  shift_for(mode);  // build the cache before the evaluator is shared
  return {"limit/" + std::string(to_string(mode)), [mode](double k) { return charfn_limit(k, mode); }};
}

CharFnModel excluded_charfn(double epsilon, OrientationMode mode) {
  require_epsilon(epsilon);
  geometry_for(mode);
  return {"excluded/" + std::string(to_string(mode)) + "/eps=" + std::to_string(epsilon),
          [epsilon, mode](double k) { return charfn_excluded(k, epsilon, mode); }};
}

DistributionCurve invert_charfn(const CharFnModel& charfn, const UniformGrid& grid, const InversionOptions& opt) {
  grid.validate();
  if (!(opt.tolerance > 0.0)) throw DomainError("inversion tolerance must be positive");

  // Upper cutoff: first k on a geometric ladder where |p| stays below the
  // threshold for a few further probes.
  double cutoff = 0.0;
  for (double k = 0.25; k <= opt.max_cutoff; k *= 1.25) {
    auto small = [&](double kk) { return std::abs(charfn(kk)) < opt.cutoff_modulus; };
    if (small(k) && small(1.1 * k) && small(1.25 * k) && small(1.5 * k) && small(2.0 * k)) {
      cutoff = k;
      break;
    }
  }
  if (cutoff == 0.0) {
    throw NumericalError("invert_charfn: |p(k)| does not fall below " + std::to_string(opt.cutoff_modulus) +
                             " before k=" + std::to_string(opt.max_cutoff) +
                             "; the density is too narrow for this grid, widen the grid or raise max_cutoff",
                         std::abs(charfn(opt.max_cutoff)), opt.cutoff_modulus);
  }

  const std::size_t n = grid.points;
  const double g0 = grid.min;
  const double dg = grid.step();
  const double g_abs = std::max(std::abs(grid.min), std::abs(grid.max));

  struct Panel {
    double a;
    double b;
    std::vector<double> contrib;
  };
  // (1/pi) sum_nodes w Re[exp(i k g_j) p(k)] for all grid nodes j.
  auto evaluate = [&](double a, double b) {
    std::vector<double> out(n, 0.0);
    quadrature::gauss_legendre_16(a, b, [&](double k, double w) {
      const Complex p = charfn(k) * (w / kPi);
      Complex phase = std::exp(Complex(0.0, k * g0));
      const Complex rot = std::exp(Complex(0.0, k * dg));
      for (std::size_t j = 0; j < n; ++j) {
        if (j % 256 == 0) phase = std::exp(Complex(0.0, k * (g0 + dg * static_cast<double>(j))));
        out[j] += (phase * p).real();
        phase *= rot;
      }
    });
    return out;
  };

  const double width0 = std::min(cutoff / 8.0, 2.0 * kPi / std::max(g_abs, 1e-12));
  const auto initial = static_cast<std::size_t>(std::ceil(cutoff / width0));
  std::vector<Panel> work;
  for (std::size_t i = 0; i < initial; ++i) {
    const double a = cutoff * static_cast<double>(i) / static_cast<double>(initial);
    const double b = cutoff * static_cast<double>(i + 1) / static_cast<double>(initial);
    work.push_back({a, b, evaluate(a, b)});
  }

  std::vector<double> total(n, 0.0);
  int panels = static_cast<int>(work.size());
  double worst_excess = 0.0;
  while (!work.empty()) {
    Panel p = std::move(work.back());
    work.pop_back();
    const double mid = 0.5 * (p.a + p.b);
    Panel left{p.a, mid, evaluate(p.a, mid)};
    Panel right{mid, p.b, evaluate(mid, p.b)};
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(p.contrib[j] - left.contrib[j] - right.contrib[j]));
    const double budget = opt.tolerance * (p.b - p.a) / cutoff;
    if (diff > budget) {
      // Below this the split difference is rounding noise and refining
      // further cannot help.
      double scale = 0.0;
      for (double v : p.contrib) scale = std::max(scale, std::abs(v));
      if (budget < 64.0 * std::numeric_limits<double>::epsilon() * scale) {
        throw NumericalError("invert_charfn: tolerance is below the round-off level of the panel sums", diff, budget);
      }
    }
    if (diff <= budget || panels >= opt.max_panels) {
      if (diff > budget) worst_excess = std::max(worst_excess, diff);
      for (std::size_t j = 0; j < n; ++j) total[j] += left.contrib[j] + right.contrib[j];
      continue;
    }
    panels += 2;
    work.push_back(std::move(left));
    work.push_back(std::move(right));
  }
  if (worst_excess > 0.0) {
    throw NumericalError("invert_charfn: panel budget exhausted before reaching tolerance", worst_excess,
                         opt.tolerance);
  }

  const double floor = -std::max(1e-9, 10.0 * opt.tolerance);
  double most_negative = 0.0;
  for (double& v : total) {
    if (v < 0.0) {
      most_negative = std::min(most_negative, v);
      v = 0.0;
    }
  }
  if (most_negative < floor) {
    throw NumericalError("invert_charfn: inverted density is negative beyond round-off", most_negative, floor);
  }
  return {grid, std::move(total), {OrientationMode::kParallelZ, 0.0, opt.tolerance, "inversion"}};
}

DistributionCurve gaussian_asymptote(double epsilon, const UniformGrid& grid, OrientationMode mode) {
  require_epsilon(epsilon);
  grid.validate();
  const double var = angular_second_moment(mode) / epsilon;
  const double norm = 1.0 / std::sqrt(2.0 * kPi * var);
  DistributionCurve c{grid, std::vector<double>(grid.points), {mode, epsilon, 0.0, "gaussian"}};
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double g = grid.at(i);
    c.density[i] = norm * std::exp(-0.5 * g * g / var);
  }
  return c;
}

DistributionCurve analytic_curve(OrientationMode mode, double epsilon, const UniformGrid& grid,
                                 const InversionOptions& opt) {
  if (epsilon == 0.0) return lorentzian_limit(mode, grid);
  require_epsilon(epsilon);
  auto curve = invert_charfn(excluded_charfn(epsilon, mode), grid, opt);
  curve.meta.mode = mode;
  curve.meta.epsilon = epsilon;
  return curve;
}

double normalization_estimate(const DistributionCurve& curve) {
  const double inside = curve.trapezoid_mass();
  if (curve.meta.epsilon == 0.0) {
    const auto l = lorentzian_parameters(curve.meta.mode);
    return inside + 1.0 - (l.cdf(curve.grid.max) - l.cdf(curve.grid.min));
  }
  const double sigma = std::sqrt(angular_second_moment(curve.meta.mode) / curve.meta.epsilon);
  return inside + 0.5 * gaussian_tail_mass(-curve.grid.min, sigma) + 0.5 * gaussian_tail_mass(curve.grid.max, sigma);
}

double sup_distance(const DistributionCurve& a, const DistributionCurve& b, double center, double radius) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.density.size(); ++i) {
    const double g = a.grid.at(i);
    if (std::abs(g - center) > radius) continue;
    worst = std::max(worst, std::abs(a.density[i] - b.interpolate(g)));
  }
  return worst;
}

}  // namespace dipolefield
