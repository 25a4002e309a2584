#include <cmath>
#include <numbers>
#include <vector>

#include "dipolefield/errors.hpp"
#include "dipolefield/geometry.hpp"
#include "dipolefield/quadrature.hpp"
#include "dipolefield/sine_integral.hpp"

namespace dipolefield {
namespace {

// p_step(k) - 1 = -2|k| D (pi/2 - \int_0^{2|k|D} (1 - cos t)/t^2 dt)
double step_minus_one(double k, double d_inf) {
  const double x = 2.0 * std::abs(k) * d_inf;
  if (x == 0.0) return 0.0;
  return -x * (std::numbers::pi / 2.0 - integral_one_minus_cos_over_t2(x));
}

// \int_{-2}^{2} (exp(-ikg) - 1) [P(g) - P_step(g)] dg. The difference is
// bounded and vanishes for |g| > 2; the "-1" is free because both densities
// are normalized, and it removes the cancellation at small k.
//
// With `remove_linear` the odd part integrates sin(kg) - kg instead, which
// subtracts k times the first moment of the difference, i.e. -i k g_c.
Complex correction(double k, const GeometryFactor& geometry, bool remove_linear, double abs_tol) {
  if (k == 0.0) return {0.0, 0.0};
  const double d_inf = geometry.d_infinity();
  auto f = [&](double g) -> Complex {
    const double step = std::abs(g) > 2.0 * d_inf ? d_inf / (g * g) : 0.0;
    const double diff = geometry.density(g) - step;
    const double s = std::sin(0.5 * k * g);
    const double odd = remove_linear ? std::sin(k * g) - k * g : std::sin(k * g);
    return {-2.0 * s * s * diff, -odd * diff};
  };

  // Pre-split each smooth panel to about half an oscillation period.
  const auto bp = geometry.breakpoints();
  std::vector<double> pts;
  pts.push_back(bp.front());
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i];
    const double b = bp[i + 1];
    const auto n = static_cast<std::size_t>(std::ceil((b - a) * std::abs(k) / std::numbers::pi));
    const std::size_t parts = std::max<std::size_t>(1, n);
    for (std::size_t j = 1; j <= parts; ++j) pts.push_back(j == parts ? b : a + (b - a) * j / parts);
  }
  const quadrature::Options opt{abs_tol, 1e-12, static_cast<int>(pts.size()) + 20000};
  auto r = quadrature::integrate<Complex>(f, std::span<const double>(pts), opt);
  if (!r.converged) {
    throw NumericalError("charfn_single: correction integral did not converge at k=" + std::to_string(k),
                         std::abs(r.value), r.error);
  }
  return r.value;
}

}  // namespace

Complex charfn_step(double k, double d_inf) {
  if (!(d_inf > 0.0)) throw DomainError("d_infinity must be positive");
  return {1.0 + step_minus_one(k, d_inf), 0.0};
}

Complex charfn_single_minus_one(double k, const GeometryFactor& geometry) {
  if (!std::isfinite(k)) throw DomainError("charfn_single requires finite k");
  return Complex(step_minus_one(k, geometry.d_infinity()), 0.0) + correction(k, geometry, false, 1e-11);
}

Complex charfn_single_excess(double q, const GeometryFactor& geometry, double abs_tol) {
  if (!std::isfinite(q)) throw DomainError("charfn_single_excess requires finite q");
  // step part + pi D |q| = 2|q| D \int_0^{2|q|D} (1 - cos t)/t^2 dt
  const double x = 2.0 * std::abs(q) * geometry.d_infinity();
  return Complex(x * integral_one_minus_cos_over_t2(x), 0.0) + correction(q, geometry, true, abs_tol);
}

Complex charfn_single(double k, const GeometryFactor& geometry) {
  return 1.0 + charfn_single_minus_one(k, geometry);
}

CharFnModel single_dipole_charfn(const GeometryFactor& geometry) {
  return {std::string("single-dipole/") + std::string(to_string(geometry.mode())),
          [geometry](double k) { return charfn_single(k, geometry); }};
}

}  // namespace dipolefield
