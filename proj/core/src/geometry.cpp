#include "dipolefield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dipolefield/errors.hpp"
#include "dipolefield/quadrature.hpp"

namespace dipolefield {
namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;
constexpr double kParallelNorm = 1.0 / (3.0 * kSqrt3);

// asinh(sqrt 3) / sqrt 3 = \int_0^1 dmu / sqrt(1 + 3 mu^2)
double inverse_length_integral() noexcept { return std::asinh(kSqrt3) / kSqrt3; }

// Integral over phi ~ U[0, 2pi) of v = a + b sin(phi) restricted to
// lo < v < hi, divided by 2pi. sin(phi) has density 1/(pi sqrt(1 - s^2)).
double azimuth_average(double a, double b, double lo, double hi) noexcept {
  if (b <= 0.0) return (a > lo && a < hi) ? a : 0.0;
  const double s_lo = std::clamp((lo - a) / b, -1.0, 1.0);
  const double s_hi = std::clamp((hi - a) / b, -1.0, 1.0);
  if (s_hi <= s_lo) return 0.0;
  auto primitive = [a, b](double s) { return a * std::asin(s) - b * std::sqrt(std::max(0.0, 1.0 - s * s)); };
  return (primitive(s_hi) - primitive(s_lo)) / std::numbers::pi;
}

// D_p(g) / g^2 on (-2, 1). Rationalizing 2 - (2 + g) sqrt(1 - g) with
// (2 + g)^2 (1 - g) = 4 - 3g^2 - g^3 removes the cancellation near g = 0.
double parallel_ratio(double g) noexcept {
  return kParallelNorm * (3.0 + g) / (2.0 + (2.0 + g) * std::sqrt(1.0 - g));
}

}  // namespace

double d_infinity(OrientationMode mode) noexcept {
  if (mode == OrientationMode::kParallelZ) return 2.0 * kParallelNorm;
  return 0.25 + kSqrt3 / 24.0 * std::asinh(kSqrt3);
}

double geometry_factor_parallel(double g) noexcept {
  if (g > -2.0 && g < 1.0) return g * g * parallel_ratio(g);
  return 2.0 * kParallelNorm;
}

double geometry_factor_step(double g, double d_inf) {
  if (!(d_inf > 0.0)) throw DomainError("d_infinity must be positive, got " + std::to_string(d_inf));
  return std::abs(g) > 2.0 * d_inf ? d_inf : 0.0;
}

double geometry_factor_random(double g, double abs_tol) {
  if (g == 0.0 || !std::isfinite(g)) {
    throw DomainError("geometry_factor_random requires a finite nonzero g, got " + std::to_string(g));
  }
  // (mu1, mu2) -> (-mu1, -mu2) leaves d unchanged, so mu1 is folded onto
  // [0, 1] and the measure dmu1 dmu2 / 4 becomes dmu1 dmu2 / 2.
  // Over mu2 the phi-average has sqrt cusps where the extreme a +- b of d
  // over phi crosses 0 or g. Writing mu2 = cos(t), a +- b = L sin(t - alpha)
  // with L = sqrt(1 + 3 mu1^2), so the cusps are known in closed form; over
  // mu1 the inner integral kinks where L = |g|.
  bool inner_ok = true;
  auto inner = [&](double mu1) {
    const double s1 = std::sqrt(std::max(0.0, 1.0 - mu1 * mu1));
    auto f = [&](double mu2) {
      const double a = -2.0 * mu1 * mu2;
      const double b = s1 * std::sqrt(std::max(0.0, 1.0 - mu2 * mu2));
      return g > 0.0 ? azimuth_average(a, b, 0.0, g) : -azimuth_average(a, b, g, 0.0);
    };
    const double length = std::sqrt(1.0 + 3.0 * mu1 * mu1);
    const double alpha = std::atan2(2.0 * mu1, s1);
    std::vector<double> pts{-1.0, 0.0, 1.0};
    for (double c : {0.0, g}) {
      if (std::abs(c) >= length) continue;
      const double t = std::asin(c / length);
      for (double theta : {alpha + t, alpha + std::numbers::pi - t}) {
        const double mu2 = std::cos(theta);
        if (mu2 > -1.0 && mu2 < 1.0) pts.push_back(mu2);
      }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto r = quadrature::integrate(f, std::span<const double>(pts), {abs_tol * 0.25, 0.0, 4000});
    inner_ok = inner_ok && r.converged;
    return 0.5 * r.value;
  };
  std::vector<double> outer_pts{0.0, 1.0};
  const double mu_star_sq = (g * g - 1.0) / 3.0;
  if (mu_star_sq > 0.0 && mu_star_sq < 1.0) outer_pts.insert(outer_pts.begin() + 1, std::sqrt(mu_star_sq));
  auto outer = quadrature::integrate(inner, std::span<const double>(outer_pts), {abs_tol, 0.0, 4000});
  if (!outer.converged || !inner_ok) {
    throw NumericalError("geometry_factor_random: quadrature did not converge at g=" + std::to_string(g),
                         outer.value, outer.error);
  }
  return outer.value;
}

double geometry_factor_random_closed_form(double g) noexcept {
  const double ag = std::abs(g);
  if (ag >= 2.0) return d_infinity(OrientationMode::kRandomIsotropic);
  if (ag <= 1.0) return 0.25 * ag * ag * inverse_length_integral();
  // L(mu) = sqrt(1 + 3 mu^2) crosses |g| at mu_star; below it min(|g|, L) = L.
  const double mu_star = std::sqrt((ag * ag - 1.0) / 3.0);
  const double as = std::asinh(kSqrt3 * mu_star);
  const double inner = 0.125 * (mu_star * ag + as / kSqrt3);
  const double outer = 0.25 * ag * ag * (std::asinh(kSqrt3) - as) / kSqrt3;
  return inner + outer;
}

GeometryFactor::GeometryFactor(OrientationMode mode)
    : mode_(mode),
      d_inf_(dipolefield::d_infinity(mode)),
      breakpoints_{-2.0, -1.0, -2.0 * d_inf_, 0.0, 2.0 * d_inf_, 1.0, 2.0} {
  std::sort(breakpoints_.begin(), breakpoints_.end());
}

double GeometryFactor::operator()(double g) const noexcept {
  return mode_ == OrientationMode::kParallelZ ? geometry_factor_parallel(g)
                                              : geometry_factor_random_closed_form(g);
}

double GeometryFactor::density(double g) const noexcept {
  if (mode_ == OrientationMode::kParallelZ) {
    if (g > -2.0 && g < 1.0) return parallel_ratio(g);
    return 2.0 * kParallelNorm / (g * g);
  }
  if (std::abs(g) <= 1.0) return 0.25 * inverse_length_integral();
  return geometry_factor_random_closed_form(g) / (g * g);
}

double single_dipole_density(double g, double n, const GeometryFactor& geometry) {
  if (!(n >= 1.0)) throw DomainError("dipole count N must be >= 1, got " + std::to_string(n));
  return n * geometry.density(n * g);
}

double shift_constant(const GeometryFactor& geometry, double g0) {
  if (!(g0 > 2.0)) throw DomainError("shift_constant requires g0 > 2, got " + std::to_string(g0));
  std::vector<double> pts{-g0};
  for (double b : geometry.breakpoints()) pts.push_back(b);
  pts.push_back(g0);
  auto r = quadrature::integrate([&](double g) { return g * geometry.density(g); }, std::span<const double>(pts),
                                 {1e-13, 0.0, 20000});
  if (!r.converged) throw NumericalError("shift_constant: quadrature did not converge", r.value, r.error);
  return r.value;
}

double shift_constant_parallel_closed_form() noexcept {
  return 2.0 / 9.0 * (3.0 + kSqrt3 * std::log((kSqrt3 - 1.0) / (kSqrt3 + 1.0)));
}

const GeometryFactor& geometry_for(OrientationMode mode) {
  static const GeometryFactor parallel(OrientationMode::kParallelZ);
  static const GeometryFactor random(OrientationMode::kRandomIsotropic);
  return mode == OrientationMode::kParallelZ ? parallel : random;
}

double shift_for(OrientationMode mode) {
  static const double parallel = shift_constant(geometry_for(OrientationMode::kParallelZ));
  static const double random = shift_constant(geometry_for(OrientationMode::kRandomIsotropic));
  return mode == OrientationMode::kParallelZ ? parallel : random;
}

}  // namespace dipolefield
