#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dipolefield/field_kernel.hpp"
#include "dipolefield/geometry.hpp"

namespace dipolefield {

/// Inclusive uniform grid [min, max] with `points` nodes.
struct UniformGrid {
  double min = -1.0;
  double max = 1.0;
  std::size_t points = 2;

  double step() const noexcept { return (max - min) / static_cast<double>(points - 1); }
  double at(std::size_t i) const noexcept { return min + step() * static_cast<double>(i); }
  void validate() const;
};

/// Largest epsilon accepted by the excluded-volume evaluators.
inline constexpr double kMaxExcludedVolume = 1e6;

struct CurveMeta {
  OrientationMode mode = OrientationMode::kParallelZ;
  double epsilon = 0.0;
  double tolerance = 0.0;
  std::string source;  ///< "lorentzian", "inversion", "gaussian", ...
};

/// Tabulated density P(g) on a uniform grid.
struct DistributionCurve {
  UniformGrid grid;
  std::vector<double> density;
  CurveMeta meta;

  /// Piecewise-linear interpolant; zero outside the grid.
  double interpolate(double g) const noexcept;
  /// Exact integral of the interpolant over [a, b] clipped to the grid.
  double integrate(double a, double b) const noexcept;
  double trapezoid_mass() const noexcept;
  /// First moment and variance of the grid-restricted, renormalized curve.
  double mean() const noexcept;
  double variance() const noexcept;
  double peak_height() const noexcept;
  double peak_location() const noexcept;
};

/// Lorentzian with half width Gamma = pi D_inf centred at the shift constant.
struct Lorentzian {
  double center = 0.0;
  double half_width = 1.0;

  double density(double g) const noexcept;
  double cdf(double g) const noexcept;
};

Lorentzian lorentzian_parameters(OrientationMode mode);

/// [g_c - 12 Gamma, g_c + 12 Gamma] with 2048 nodes.
UniformGrid default_curve_grid(OrientationMode mode);
/// The same for eps = 0; for eps > 0 narrowed to 10 standard deviations of
/// the finite-variance law when that is tighter, and centred at zero.
UniformGrid default_curve_grid(OrientationMode mode, double epsilon);

DistributionCurve lorentzian_limit(OrientationMode mode, const UniformGrid& grid);
inline DistributionCurve lorentzian_limit(OrientationMode mode) {
  return lorentzian_limit(mode, default_curve_grid(mode));
}

/// exp(-pi D_inf |k| - i g_c k)
Complex charfn_limit(double k, OrientationMode mode);

/// exp(log charfn_limit(k) - eps (p_{1,1}(k/eps) - 1)); eps in (0, 1e6].
Complex charfn_excluded(double k, double epsilon, OrientationMode mode);

CharFnModel limit_charfn(OrientationMode mode);
CharFnModel excluded_charfn(double epsilon, OrientationMode mode);

struct InversionOptions {
  double tolerance = 1e-8;         ///< absolute target on the density
  double cutoff_modulus = 1e-12;   ///< |p(K)| below this ends the k-range
  double max_cutoff = 1e5;
  int max_panels = 1 << 16;
};

/// P(g) = (1/pi) \int_0^K Re[exp(ikg) p(k)] dk on every grid node, using
/// 16-point Gauss-Legendre panels refined until splitting a panel changes no
/// grid value by more than its share of the tolerance.
DistributionCurve invert_charfn(const CharFnModel& charfn, const UniformGrid& grid,
                                const InversionOptions& opt = {});

/// Zero-mean Gaussian with variance E[d^2]/eps (4/(5 eps) for parallel).
DistributionCurve gaussian_asymptote(double epsilon, const UniformGrid& grid,
                                     OrientationMode mode = OrientationMode::kParallelZ);

/// Lorentzian for eps == 0, inversion of the excluded-volume charfn otherwise.
DistributionCurve analytic_curve(OrientationMode mode, double epsilon, const UniformGrid& grid,
                                 const InversionOptions& opt = {});

/// Grid mass plus an estimate of the mass outside the grid (Lorentzian tails
/// for eps = 0, Gaussian tails with the exact variance otherwise).
double normalization_estimate(const DistributionCurve& curve);

/// Largest |a - b| over the grid of `a` restricted to |g - center| <= radius.
double sup_distance(const DistributionCurve& a, const DistributionCurve& b, double center, double radius);

}  // namespace dipolefield
