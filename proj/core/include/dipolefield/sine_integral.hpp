#pragma once

namespace dipolefield {

/// Si(x) = \int_0^x sin(t)/t dt. Odd in x; Si(+inf) = pi/2.
///
/// Power series for |x| < 4; for larger arguments the Lentz continued
/// fraction of E1(ix). Absolute error below 1e-14 on the whole real line.
double sine_integral(double x);

/// \int_0^x (1 - cos t)/t^2 dt = Si(x) - (1 - cos x)/x, odd in x.
double integral_one_minus_cos_over_t2(double x);

}  // namespace dipolefield
