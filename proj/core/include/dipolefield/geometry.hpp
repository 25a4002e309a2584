#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string>

#include "dipolefield/field_kernel.hpp"

namespace dipolefield {

/// Asymptotic value of D(g) for |g| > 2: 2/(3 sqrt 3) for parallel dipoles,
/// 1/4 + sqrt(3)/24 asinh(sqrt 3) for random orientation.
double d_infinity(OrientationMode mode) noexcept;

/// Closed-form geometry factor for dipoles along z.
double geometry_factor_parallel(double g) noexcept;

/// Step approximation: D_inf for |g| > 2 D_inf, zero inside. The edge at
/// 2 D_inf is where g^-2 D normalizes to one.
double geometry_factor_step(double g, double d_inf);

/// Geometry factor for randomly oriented dipoles, E[|d| 1(0 < d/g < 1)],
/// evaluated by adaptive quadrature over (mu1, mu2) with the azimuth phi
/// integrated in closed form. Even in g; requires g != 0.
///
/// Throws NumericalError (carrying the estimate) if the requested absolute
/// tolerance is not reached.
double geometry_factor_random(double g, double abs_tol = 1e-11);

/// Same quantity in closed form. For a fixed direction r-hat the projection
/// n-hat . (z - 3 (r.z) r) of a uniform unit vector is uniform on [-L, L]
/// with L = sqrt(1 + 3 mu1^2), which collapses the average to one dimension.
double geometry_factor_random_closed_form(double g) noexcept;

/// D(g) for one orientation mode together with the derived single-dipole
/// quantities. Cheap to copy; all members are pure.
class GeometryFactor {
 public:
  explicit GeometryFactor(OrientationMode mode);

  OrientationMode mode() const noexcept { return mode_; }
  double d_infinity() const noexcept { return d_inf_; }

  double operator()(double g) const noexcept;

  /// P_{1,1}(g) = D(g)/g^2, finite at g = 0.
  double density(double g) const noexcept;

  /// Points in [-2, 2] where D or the step approximation is not smooth.
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }

 private:
  OrientationMode mode_;
  double d_inf_;
  std::array<double, 7> breakpoints_;
};

/// P_{1,N}(g) = D(N g) / (N g^2), i.e. N P_{1,1}(N g).
double single_dipole_density(double g, double n, const GeometryFactor& geometry);

/// Symmetric-limits first moment \int_{-g0}^{g0} g P_{1,1}(g) dg; independent
/// of g0 once g0 > 2.
double shift_constant(const GeometryFactor& geometry, double g0 = 3.0);

/// (2/9)(3 + sqrt 3 log((sqrt 3 - 1)/(sqrt 3 + 1))).
double shift_constant_parallel_closed_form() noexcept;

/// Convention p(k) = \int exp(-i k g) P(g) dg.
using Complex = std::complex<double>;

/// Characteristic function of the step-approximated single-dipole density.
Complex charfn_step(double k, double d_inf);

/// Characteristic function of P_{1,1}: step part plus a bounded correction
/// integral over [-2, 2].
Complex charfn_single(double k, const GeometryFactor& geometry);

/// charfn_single(k) - 1 evaluated without subtracting nearly equal numbers.
Complex charfn_single_minus_one(double k, const GeometryFactor& geometry);

/// p_{1,1}(q) - 1 + pi D_inf |q| + i g_c q, i.e. the part of the
/// single-dipole characteristic function beyond its linear small-q terms.
/// O(q^2) at small q (2/5 q^2 for parallel dipoles) and computed without
/// cancelling the linear terms numerically.
Complex charfn_single_excess(double q, const GeometryFactor& geometry, double abs_tol = 1e-11);

/// A characteristic function k -> p(k) with a label for diagnostics. The
/// evaluator must be safe to call concurrently.
struct CharFnModel {
  std::string label;
  std::function<Complex(double)> evaluate;

  Complex operator()(double k) const { return evaluate(k); }
};

CharFnModel single_dipole_charfn(const GeometryFactor& geometry);

/// Cached per-mode geometry and shift constant, built once on first use.
const GeometryFactor& geometry_for(OrientationMode mode);
double shift_for(OrientationMode mode);

}  // namespace dipolefield
