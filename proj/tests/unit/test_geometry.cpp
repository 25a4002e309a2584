#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>
#include <numbers>
#include <random>

#include "dipolefield/errors.hpp"
#include "dipolefield/geometry.hpp"
#include "oracles.hpp"

using namespace dipolefield;
using doctest::Approx;

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kDinfParallel = 2.0 / (3.0 * kSqrt3);
// 1/4 + sqrt(3)/24 asinh(sqrt 3), mpmath
const double kDinfRandom = 0.34504324953761829344138678186;

// P_{1,1} integrated over |g| <= G by fixed panels plus the exact tail 2 D_inf / G.
double normalization(const GeometryFactor& geo, double big) {
  auto p = [&](double g) { return geo.density(g); };
  double inner = oracle::composite_cut(p, {-2.0, -1.0, 0.0, 1.0, 2.0}, 400);
  inner += oracle::composite(p, 2.0, big, 2000) + oracle::composite(p, -big, -2.0, 2000);
  return inner + 2.0 * geo.d_infinity() / big;
}

}  // namespace

TEST_CASE("parallel geometry factor") {
  CHECK(geometry_factor_parallel(0.0) == 0.0);
  CHECK(geometry_factor_parallel(5.0) == Approx(0.3849).epsilon(1e-4));
  CHECK(geometry_factor_parallel(5.0) == Approx(kDinfParallel).epsilon(1e-15));
  CHECK(geometry_factor_parallel(-2.0) == Approx(kDinfParallel).epsilon(1e-15));
  CHECK(geometry_factor_parallel(std::nextafter(-2.0, 0.0)) == Approx(kDinfParallel).epsilon(1e-12));
  CHECK(geometry_factor_parallel(1.0) == Approx(kDinfParallel).epsilon(1e-15));
  for (double g : {2.001, 5.0, 100.0}) {
    CHECK(geometry_factor_parallel(g) == kDinfParallel);
    CHECK(geometry_factor_parallel(-g) == kDinfParallel);
  }
}

TEST_CASE("parallel closed form against the defining average over mu") {
  // D(g) = E_mu[|d| 1(d between 0 and g)], d = 1 - 3 mu^2, mu uniform on [0, 1]
  auto direct = [](double g) {
    auto f = [g](double mu) {
      const double d = 1.0 - 3.0 * mu * mu;
      const bool inside = g > 0.0 ? (d > 0.0 && d < g) : (d < 0.0 && d > g);
      return inside ? std::abs(d) : 0.0;
    };
    std::vector<double> cuts{0.0, 1.0 / std::sqrt(3.0), 1.0};
    const double edge = (1.0 - g) / 3.0;
    if (edge > 0.0 && edge < 1.0) cuts.push_back(std::sqrt(edge));
    std::sort(cuts.begin(), cuts.end());
    return oracle::composite_cut(f, cuts, 4);
  };
  for (double g : {-3.0, -1.9, -1.0, -0.4, -0.01, 0.01, 0.3, 0.5, 0.99, 1.5, 7.0}) {
    CAPTURE(g);
    CHECK(std::abs(geometry_factor_parallel(g) - direct(g)) < 1e-13);
  }
}

TEST_CASE("step geometry factor edge from the normalization identity") {
  // 2 D / a = 1  =>  a = 2 D
  const double edge = 2.0 * kDinfParallel;
  CHECK(edge == Approx(0.7698).epsilon(1e-4));
  CHECK(geometry_factor_step(1.0, kDinfParallel) == kDinfParallel);
  CHECK(geometry_factor_step(0.5, kDinfParallel) == 0.0);
  CHECK(geometry_factor_step(-3.0, kDinfParallel) == kDinfParallel);
  const double tail = oracle::composite([&](double u) { return geometry_factor_step(1.0 / u, kDinfParallel); }, 0.0, 1.0 / edge, 50);
  CHECK(2.0 * tail == Approx(1.0).epsilon(1e-12));  // substitution g = 1/u
  CHECK_THROWS_AS(geometry_factor_step(1.0, 0.0), DomainError);
}

TEST_CASE("asymptotic values") {
  CHECK(std::abs(d_infinity(OrientationMode::kParallelZ) - kDinfParallel) < 1e-15);
  CHECK(d_infinity(OrientationMode::kParallelZ) == Approx(0.3849).epsilon(1e-4));
  CHECK(std::abs(d_infinity(OrientationMode::kRandomIsotropic) - kDinfRandom) < 1e-15);
  CHECK(d_infinity(OrientationMode::kRandomIsotropic) == Approx(0.3450).epsilon(1e-4));
  CHECK(geometry_factor_parallel(100.0) == d_infinity(OrientationMode::kParallelZ));
  CHECK(geometry_factor_parallel(-100.0) == d_infinity(OrientationMode::kParallelZ));
}

TEST_CASE("random geometry factor: quadrature, closed form and reference values agree") {
  // mpmath values of the same expectation (tests/oracles/freeze_values.py)
  CHECK(std::abs(geometry_factor_random_closed_form(1.0) - 0.19008649907523658688277356372) < 1e-15);
  CHECK(std::abs(geometry_factor_random_closed_form(1.5) - 0.30562604784479509044215508198) < 1e-15);
  CHECK(std::abs(geometry_factor_random_closed_form(10.0) - kDinfRandom) < 1e-15);
  for (double g : {0.1, 0.5, 1.0, 1.2, 1.5, 1.9, 2.5, 10.0}) {
    CAPTURE(g);
    const double quad = geometry_factor_random(g);
    CHECK(std::abs(quad - geometry_factor_random_closed_form(g)) < 1e-12);
    CHECK(std::abs(geometry_factor_random(-g) - quad) < 1e-12);  // evenness
  }
  CHECK(geometry_factor_random(10.0) == Approx(0.3450).epsilon(1e-4));
  CHECK(geometry_factor_random(-10.0) == Approx(0.3450).epsilon(1e-4));
  CHECK_THROWS_AS(geometry_factor_random(0.0), DomainError);
}

TEST_CASE("random geometry factor at g=1 against Monte Carlo angle sampling") {
  std::mt19937_64 rng(314159);
  std::uniform_real_distribution<double> cosine(-1.0, 1.0), azimuth(0.0, 2.0 * std::numbers::pi);
  const int samples = 10'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double mu1 = cosine(rng), mu2 = cosine(rng), phi = azimuth(rng);
    const double d = std::sqrt(1 - mu1 * mu1) * std::sqrt(1 - mu2 * mu2) * std::sin(phi) - 2 * mu1 * mu2;
    const double v = (d > 0.0 && d < 1.0) ? d : 0.0;
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
  const double frozen = 0.190086499075237;  // closed form, agreed above with mpmath
  CHECK(std::abs(mean - frozen) < 3.0 * se);
  CHECK(std::abs(geometry_factor_random(1.0) - frozen) < 1e-9);
}

TEST_CASE("geometry factor object") {
  const GeometryFactor par(OrientationMode::kParallelZ);
  const GeometryFactor rnd(OrientationMode::kRandomIsotropic);
  CHECK(par(0.3) == geometry_factor_parallel(0.3));
  CHECK(rnd(1.3) == geometry_factor_random_closed_form(1.3));
  for (double g : {2.001, 5.0, 100.0}) {
    CHECK(par(g) == par.d_infinity());
    CHECK(rnd(-g) == rnd.d_infinity());
  }
  // D >= 0
  for (double g = -3.0; g <= 3.0; g += 0.01) {
    CHECK(par(g) >= 0.0);
    CHECK(rnd(g) >= 0.0);
  }
  CHECK(std::is_sorted(par.breakpoints().begin(), par.breakpoints().end()));
}

TEST_CASE("single-dipole density examples") {
  const GeometryFactor par(OrientationMode::kParallelZ);
  CHECK(single_dipole_density(5.0, 1.0, par) == Approx(kDinfParallel / 25.0).epsilon(1e-14));
  CHECK(single_dipole_density(5.0, 1.0, par) == Approx(0.0154).epsilon(1e-2));
  // g -> 0 limit 1/(4 sqrt 3)
  CHECK(single_dipole_density(0.0, 1.0, par) == Approx(1.0 / (4.0 * kSqrt3)).epsilon(1e-15));
  CHECK(single_dipole_density(0.0, 1.0, par) == Approx(0.14434).epsilon(1e-4));
  CHECK(single_dipole_density(1e-4, 1.0, par) == Approx(geometry_factor_parallel(1e-4) / 1e-8).epsilon(1e-6));
  for (double g : {-1.5, -0.3, 0.2, 0.9}) {
    const double unrationalized = (2.0 - (2.0 + g) * std::sqrt(1.0 - g)) / (3.0 * kSqrt3 * g * g);
    CHECK(par.density(g) == Approx(unrationalized).epsilon(1e-12));
  }
  CHECK(single_dipole_density(0.5, 10.0, par) == Approx(10.0 * single_dipole_density(5.0, 1.0, par)).epsilon(1e-15));
  CHECK(single_dipole_density(0.5, 10.0, par) == Approx(0.154).epsilon(1e-2));
  CHECK_THROWS_AS(single_dipole_density(0.5, 0.5, par), DomainError);

  const GeometryFactor rnd(OrientationMode::kRandomIsotropic);
  CHECK(rnd.density(0.0) == Approx(geometry_factor_random_closed_form(0.5) / 0.25).epsilon(1e-14));
  CHECK(rnd.density(0.0) == Approx(geometry_factor_random(0.5) / 0.25).epsilon(1e-9));
}

TEST_CASE("scaling law P_{1,N}(g) = N P_{1,1}(N g)") {
  const GeometryFactor par(OrientationMode::kParallelZ);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> g(-3.0, 3.0), n(1.0, 1e4);
  for (int i = 0; i < 500; ++i) {
    const double gi = g(rng), ni = n(rng);
    CHECK(single_dipole_density(gi, ni, par) == Approx(ni * single_dipole_density(ni * gi, 1.0, par)).epsilon(1e-14));
  }
}

TEST_CASE("single-dipole density is normalized") {
  for (auto mode : {OrientationMode::kParallelZ, OrientationMode::kRandomIsotropic}) {
    CAPTURE(to_string(mode));
    CHECK(std::abs(normalization(GeometryFactor(mode), 1e3) - 1.0) < 1e-8);
  }
}

TEST_CASE("shift constant") {
  const GeometryFactor par(OrientationMode::kParallelZ);
  const double closed = shift_constant_parallel_closed_form();
  CHECK(std::abs(closed - 0.159769335799369101645937163413) < 1e-15);  // mpmath
  CHECK(shift_constant(par, 3.0) == Approx(0.1598).epsilon(1e-3));
  CHECK(std::abs(shift_constant(par, 3.0) - closed) < 1e-12);
  CHECK(std::abs(shift_constant(par, 100.0) - closed) < 1e-10);
  CHECK(std::abs(shift_constant(par, 2.5) - shift_constant(par, 50.0)) < 1e-8);

  const GeometryFactor rnd(OrientationMode::kRandomIsotropic);
  CHECK(std::abs(shift_constant(rnd, 3.0)) < 1e-12);
  CHECK(std::abs(shift_constant(rnd, 2.5) - shift_constant(rnd, 50.0)) < 1e-8);

  CHECK_THROWS_AS(shift_constant(par, 2.0), DomainError);
  CHECK_THROWS_AS(shift_constant(par, 1.0), DomainError);
  CHECK(shift_for(OrientationMode::kParallelZ) == shift_constant(par, 3.0));
}
