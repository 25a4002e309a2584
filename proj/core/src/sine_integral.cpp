#include "dipolefield/sine_integral.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace dipolefield {
namespace {

constexpr double kSeriesLimit = 4.0;

double si_series(double x) {
  // sum_n (-1)^n x^(2n+1) / ((2n+1) (2n+1)!)
  const double x2 = x * x;
  double term = x;  // x^(2n+1)/(2n+1)!
  double sum = x;
  for (int n = 1; n < 60; ++n) {
    term *= -x2 / ((2.0 * n) * (2.0 * n + 1.0));
    const double add = term / (2.0 * n + 1.0);
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double si_continued_fraction(double x) {
  // E1(ix) = exp(-ix) * 1/(1+ix- 1^2/(3+ix- 2^2/(5+ix- ...))), then
  // Si(x) = pi/2 + Im[E1(ix)] for x > 0.
  using cplx = std::complex<double>;
  constexpr double tiny = 1e-300;
  constexpr double eps = 4.0 * std::numeric_limits<double>::epsilon();
  cplx b(1.0, x);
  cplx c(1.0 / tiny, 0.0);
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 2; i < 100000; ++i) {
    const double a = -static_cast<double>(i - 1) * static_cast<double>(i - 1);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
  }
  h *= cplx(std::cos(x), -std::sin(x));
  return std::numbers::pi / 2.0 + h.imag();
}

}  // namespace

double sine_integral(double x) {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  if (std::isinf(ax)) return std::copysign(std::numbers::pi / 2.0, x);
  const double v = ax < kSeriesLimit ? si_series(ax) : si_continued_fraction(ax);
  return std::copysign(v, x);
}

double integral_one_minus_cos_over_t2(double x) {
  if (x == 0.0) return 0.0;
  const double s = std::sin(0.5 * x);
  return sine_integral(x) - 2.0 * s * s / x;
}

}  // namespace dipolefield
