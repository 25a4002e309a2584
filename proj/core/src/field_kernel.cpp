#include "dipolefield/field_kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dipolefield/errors.hpp"

namespace dipolefield {
namespace detail {

void throw_bad_cosine(const char* name, double value) {
  throw DomainError(std::string(name) + " must lie in [-1, 1], got " + std::to_string(value));
}

void throw_bad_azimuth(double value) {
  throw DomainError("phi must lie in [0, 2pi), got " + std::to_string(value));
}

void throw_bad_radius(double value) {
  throw DomainError("cubed radius x must be positive, got " + std::to_string(value));
}

}  // namespace detail

std::string_view to_string(OrientationMode mode) noexcept {
  switch (mode) {
    case OrientationMode::kParallelZ:
      return "parallel";
    case OrientationMode::kRandomIsotropic:
      return "random";
  }
  return "parallel";
}

OrientationMode parse_orientation_mode(std::string_view text) {
  if (text == "parallel" || text == "parallel_z" || text == "PARALLEL_Z") {
    return OrientationMode::kParallelZ;
  }
  if (text == "random" || text == "random_isotropic" || text == "RANDOM_ISOTROPIC") {
    return OrientationMode::kRandomIsotropic;
  }
  throw DomainError("unknown orientation mode '" + std::string(text) + "' (expected parallel or random)");
}

double field_scale(double dipole_constant, double density) {
  if (!(density > 0.0)) {
    throw DomainError("dipole density must be positive, got " + std::to_string(density));
  }
  return dipole_constant * 4.0 * std::numbers::pi * density / 3.0;
}

double physical_field(double g, double dipole_constant, double density) {
  return g * field_scale(dipole_constant, density);
}

double angular_second_moment(OrientationMode mode) noexcept {
  // Parallel: E[(1-3mu^2)^2] = 1 - 2 + 9/5. Random: d | mu1 is uniform on
  // [-L, L] with L^2 = 1 + 3 mu1^2, so E[d^2] = E[L^2]/3.
  return mode == OrientationMode::kParallelZ ? 4.0 / 5.0 : 2.0 / 3.0;
}

}  // namespace dipolefield
