#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dipolefield/errors.hpp"
#include "dipolefield/field_kernel.hpp"
#include "dipolefield/geometry.hpp"
#include "dipolefield/montecarlo.hpp"
#include "oracles.hpp"

using namespace dipolefield;
using doctest::Approx;

namespace {

// P(d/x <= t) for one parallel dipole with x uniform on (0, 1), as an average
// over mu in [0, 1] of the conditional probability in x (no use of P_{1,1}).
double single_dipole_cdf(double t) {
  auto conditional = [t](double mu) {
    const double d = 1.0 - 3.0 * mu * mu;
    if (t > 0.0) return d <= 0.0 ? 1.0 : std::max(0.0, 1.0 - d / t);
    if (t < 0.0) return d >= 0.0 ? 0.0 : std::min(1.0, d / t);
    return d <= 0.0 ? 1.0 : 0.0;
  };
  std::vector<double> cuts{0.0, 1.0 / std::sqrt(3.0), 1.0};
  const double kink = (1.0 - t) / 3.0;
  if (kink > 0.0 && std::sqrt(kink) < 1.0) cuts.push_back(std::sqrt(kink));
  std::sort(cuts.begin(), cuts.end());
  return oracle::composite_cut(conditional, cuts, 1, 20);
}

SimulationSpec small_spec(double eps = 0.0, OrientationMode mode = OrientationMode::kParallelZ) {
  SimulationSpec s;
  s.n_dipoles = 100;
  s.realizations = 5000;
  s.epsilon = eps;
  s.mode = mode;
  s.seed = 42;
  s.binning = {-8.0, 8.0, 161};
  return s;
}

}  // namespace

TEST_CASE("aligned dipole at unit distance gives -2") {
  DipolePlacement p{1.0, 1.0, 0.0, 0.0};
  CHECK(reduced_field_contribution(p.x, angular_factor(OrientationMode::kParallelZ, p)) == -2.0);
}

TEST_CASE("specification validation") {
  auto s = small_spec();
  CHECK_NOTHROW(s.validate());
  s.n_dipoles = 0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = small_spec();
  s.realizations = 0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = small_spec(-1.0);
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = small_spec();
  s.binning = {1.0, -1.0, 10};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.binning = {-1.0, 1.0, 1};
  CHECK_THROWS_AS(s.validate(), DomainError);
  RunOptions tight;
  tight.memory_budget_bytes = 64;
  CHECK_THROWS_AS(run_simulation(small_spec(), tight), DomainError);
}

TEST_CASE("default binning") {
  const auto b0 = default_binning(OrientationMode::kParallelZ, 0.0);
  CHECK(b0.min == -8.0);
  CHECK(b0.max == 8.0);
  CHECK(b0.bins == 401);
  const auto b1 = default_binning(OrientationMode::kParallelZ, 0.8);
  CHECK(b1.max == Approx(6.0));
  CHECK(b1.min == Approx(-6.0));
}

TEST_CASE("histogram invariants") {
  const auto h = run_simulation(small_spec());
  std::uint64_t total = h.underflow + h.overflow;
  double area = 0.0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    total += h.counts[i];
    area += h.normalized_height(i) * h.binning.width();
  }
  CHECK(total == h.realizations);
  CHECK(h.realizations == 5000);
  CHECK(area == Approx(static_cast<double>(h.realizations - h.underflow - h.overflow) / h.realizations));
  CHECK(h.field.count() == 5000);
  CHECK(h.angular.count() == 5000 * 100);
  CHECK_FALSE(h.variance_converged());
  CHECK(run_simulation(small_spec(1.0)).variance_converged());
}

TEST_CASE("single-dipole draws follow the single-dipole law (KS)") {
  SimulationSpec s;
  s.n_dipoles = 1;
  const std::size_t m = 100000;
  PhiloxStream rng(7, 0);
  std::vector<double> g(m);
  for (auto& v : g) v = sample_realization(s, rng);
  std::sort(g.begin(), g.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double f = single_dipole_cdf(g[i]);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / m), std::abs(f - static_cast<double>(i + 1) / m)});
  }
  CHECK(ks < 1.63 / std::sqrt(static_cast<double>(m)));

  // the CDF oracle agrees with the analytic density
  const GeometryFactor geo(OrientationMode::kParallelZ);
  const double mass = oracle::composite([&](double t) { return single_dipole_density(t, 1.0, geo); }, -1.0, 0.5, 400);
  CHECK(single_dipole_cdf(0.5) - single_dipole_cdf(-1.0) == Approx(mass).epsilon(1e-6));
}

TEST_CASE("excluded core eps = 2, N = 1: variance against the conditional density") {
  // x uniform on (2, 3): P(g) = 9 P11(3g) - 4 P11(2g), the difference of the
  // shells (0, 3) and (0, 2) rescaled.
  const GeometryFactor geo(OrientationMode::kParallelZ);
  auto p = [&](double g) { return 9.0 * geo.density(3.0 * g) - 4.0 * geo.density(2.0 * g); };
  const std::vector<double> cuts{-1.0, -2.0 / 3.0, -0.5, -1.0 / 3.0, 0.0, 1.0 / 3.0, 0.5, 1.0};
  const double mass = oracle::composite_cut(p, cuts, 1000);
  const double var = oracle::composite_cut([&](double g) { return g * g * p(g); }, cuts, 1000);
  CHECK(mass == Approx(1.0).epsilon(1e-8));  // sqrt cusps limit the fixed-panel rule
  CHECK(var == Approx(2.0 / 15.0).epsilon(1e-8));

  SimulationSpec s;
  s.n_dipoles = 1;
  s.epsilon = 2.0;
  s.realizations = 100000;
  s.binning = {-1.0, 1.0, 40};
  const auto h = run_simulation(s);
  CHECK(h.underflow + h.overflow == 0);
  CHECK(h.field.variance() == Approx(var).epsilon(0.03));
}

TEST_CASE("bit-identical results for any worker count") {
  auto s = small_spec(0.0, OrientationMode::kRandomIsotropic);
  s.realizations = 5000;  // not a multiple of the block size
  RunOptions one, two, four;
  one.workers = 1;
  two.workers = 2;
  four.workers = 4;
  const auto a = run_simulation(s, one), b = run_simulation(s, two), c = run_simulation(s, four);
  CHECK(a.counts == b.counts);
  CHECK(a.counts == c.counts);
  CHECK(a.underflow == c.underflow);
  CHECK(a.overflow == c.overflow);
  CHECK(a.field.mean() == c.field.mean());
  CHECK(a.field.variance() == c.field.variance());
  CHECK(a.angular.mean() == b.angular.mean());
  s.seed = 43;
  CHECK(run_simulation(s, one).counts != a.counts);
}

TEST_CASE("shell-average null") {
  for (auto mode : {OrientationMode::kParallelZ, OrientationMode::kRandomIsotropic}) {
    auto s = small_spec(0.0, mode);
    s.realizations = 20000;
    const auto h = run_simulation(s);
    CHECK(std::abs(h.angular.mean()) < 4.0 * h.angular.standard_error());
    CHECK(h.angular.variance() == Approx(angular_second_moment(mode)).epsilon(0.01));
  }
}

TEST_CASE("random orientation is symmetric about zero") {
  SimulationSpec s;
  s.n_dipoles = 1000;
  s.mode = OrientationMode::kRandomIsotropic;
  PhiloxStream rng(11, 0);
  RunningStats truncated;
  for (int i = 0; i < 20000; ++i) {
    const double g = sample_realization(s, rng);
    if (std::abs(g) < 10.0) truncated.push(g);
  }
  CHECK(std::abs(truncated.mean()) < 3.0 * truncated.standard_error());
}

TEST_CASE("finite excluded volume: vanishing mean") {
  SimulationSpec s;
  s.n_dipoles = 1000;
  s.realizations = 20000;
  s.epsilon = 2.0;
  s.seed = 5;
  s.binning = default_binning(s.mode, s.epsilon);
  const auto h = run_simulation(s);
  CHECK(std::abs(h.field.mean()) < 3.0 * h.field.standard_error());
  CHECK(h.field.variance() == Approx(0.4).epsilon(0.05));
}

TEST_CASE("peak height grows with eps") {
  double prev = 0.0;
  for (double eps : {0.0, 0.4, 1.0, 2.0}) {
    SimulationSpec s;
    s.n_dipoles = 200;
    s.realizations = 100000;
    s.epsilon = eps;
    s.seed = 8;
    s.binning = {-8.0, 8.0, 80};
    const auto h = run_simulation(s);
    double peak = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) peak = std::max(peak, h.normalized_height(i));
    CAPTURE(eps);
    CHECK(peak > prev);
    prev = peak;
  }
}

TEST_CASE("bulk is insensitive to N") {
  SimulationSpec s;
  s.realizations = 20000;
  s.binning = {-8.0, 8.0, 80};
  s.n_dipoles = 1000;
  s.seed = 21;
  const auto a = run_simulation(s);
  s.n_dipoles = 10000;
  s.seed = 22;
  const auto b = run_simulation(s);
  double chi2 = 0.0, max_z = 0.0;
  int dof = 0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    const double x = static_cast<double>(a.counts[i]), y = static_cast<double>(b.counts[i]);
    if (x + y < 20.0) continue;
    const double z = (x - y) / std::sqrt(x + y);
    chi2 += z * z;
    max_z = std::max(max_z, std::abs(z));
    ++dof;
  }
  CHECK(max_z < 5.0);
  CHECK(chi2 / dof < 1.5);
}

TEST_CASE("running statistics") {
  RunningStats a, b, all;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i * 0.7) * 3.0 + 1.0;
    (i < 37 ? a : b).push(x);
    all.push(x);
  }
  RunningStats merged = a;
  merged.merge(b);
  CHECK(merged.count() == 100);
  CHECK(merged.mean() == Approx(all.mean()).epsilon(1e-13));
  CHECK(merged.variance() == Approx(all.variance()).epsilon(1e-12));
  RunningStats batch;
  batch.merge_moments(3, 2.0, 2.0);  // {1, 2, 3}
  CHECK(batch.variance() == Approx(1.0));
}

TEST_CASE("resampling a curve") {
  const auto curve = lorentzian_limit(OrientationMode::kParallelZ);
  const Binning bins{-8.0, 8.0, 161};
  const auto h = histogram_from_curve(curve, bins, 200000, 3);
  CHECK(h.realizations == 200000);
  const double expected_tail = 1.0 - curve.trapezoid_mass();
  const double observed_tail = static_cast<double>(h.underflow + h.overflow) / h.realizations;
  const double outside = (curve.integrate(curve.grid.min, -8.0) + curve.integrate(8.0, curve.grid.max));
  CHECK(observed_tail == Approx(expected_tail + outside).epsilon(0.03));
  CHECK(histogram_from_curve(curve, bins, 1000, 3).counts == histogram_from_curve(curve, bins, 1000, 3).counts);
}
