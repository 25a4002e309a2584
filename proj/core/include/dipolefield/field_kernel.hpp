#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

namespace dipolefield {

/// Which angular-factor law applies to the dipoles.
enum class OrientationMode {
  kParallelZ,        ///< all dipoles point along +z
  kRandomIsotropic,  ///< each dipole points in an independent uniform direction
};

std::string_view to_string(OrientationMode mode) noexcept;

/// Accepts "parallel" / "random" (and the long forms "parallel_z",
/// "random_isotropic"). Throws DomainError otherwise.
OrientationMode parse_orientation_mode(std::string_view text);

/// Position (and orientation) of a single dipole relative to the probe.
///
/// `x` is the cubed radius (r/r0)^3, i.e. the mean number of dipoles inside
/// radius r. `mu` is cos(theta1) of the direction towards the dipole. In
/// random mode `mu2` is the cosine of the angle between r-hat and the dipole
/// axis and `phi` the rotation of the axis around r-hat; both are ignored
/// for parallel dipoles.
struct DipolePlacement {
  double x = 1.0;
  double mu = 0.0;
  double mu2 = 0.0;
  double phi = 0.0;
};

namespace detail {
[[noreturn]] void throw_bad_cosine(const char* name, double value);
[[noreturn]] void throw_bad_azimuth(double value);
[[noreturn]] void throw_bad_radius(double value);
}  // namespace detail

/// 1 - 3 mu^2, with mu = cos(theta). Range [-2, 1].
inline double angular_factor_parallel(double mu) {
  if (!(mu >= -1.0 && mu <= 1.0)) detail::throw_bad_cosine("mu", mu);
  return 1.0 - 3.0 * mu * mu;
}

/// sin(t1) sin(t2) sin(phi) - 2 mu1 mu2 with both sines taken nonnegative.
/// Range [-2, 2].
inline double angular_factor_random(double mu1, double mu2, double phi) {
  if (!(mu1 >= -1.0 && mu1 <= 1.0)) detail::throw_bad_cosine("mu1", mu1);
  if (!(mu2 >= -1.0 && mu2 <= 1.0)) detail::throw_bad_cosine("mu2", mu2);
  if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) detail::throw_bad_azimuth(phi);
  const double s1 = std::sqrt(1.0 - mu1 * mu1);
  const double s2 = std::sqrt(1.0 - mu2 * mu2);
  return s1 * s2 * std::sin(phi) - 2.0 * mu1 * mu2;
}

inline double angular_factor(OrientationMode mode, const DipolePlacement& p) {
  return mode == OrientationMode::kParallelZ ? angular_factor_parallel(p.mu)
                                             : angular_factor_random(p.mu, p.mu2, p.phi);
}

/// Reduced field g = d / x of one dipole. Requires x > 0.
inline double reduced_field_contribution(double x, double d) {
  if (!(x > 0.0)) detail::throw_bad_radius(x);
  return d / x;
}

/// Typical field F0 = C r0^-3 = C * 4 pi rho / 3.
double field_scale(double dipole_constant, double density);

/// g * F0 in the units of C * rho.
double physical_field(double g, double dipole_constant, double density);

/// E[d^2] over the sphere: 4/5 for parallel dipoles, 2/3 for random ones.
double angular_second_moment(OrientationMode mode) noexcept;

}  // namespace dipolefield
