#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration with an absolute error
// target. Node tables come from Boost.Math; the interval bookkeeping is ours
// because we need absolute tolerances, user breakpoints and complex-valued
// integrands with a single shared error budget.

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dipolefield::quadrature {

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 20000;
};

namespace detail {

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class T, class F>
Panel<T> gauss_kronrod_15(F& f, double a, double b) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& x = kronrod::abscissa();
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights();

  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T f0 = f(mid);
  T kr = f0 * wk[0];
  T gs = f0 * wg[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const T sum = f(mid + half * x[i]) + f(mid - half * x[i]);
    kr += sum * wk[i];
    if (i % 2 == 0) gs += sum * wg[i / 2];
  }
  using std::abs;
  const double err = std::max(abs(kr - gs) * half, 50.0 * std::numeric_limits<double>::epsilon() * abs(kr) * half);
  return {a, b, kr * half, err};
}

}  // namespace detail

/// Integrates f over [points.front(), points.back()], using every entry of
/// `points` (sorted ascending) as a panel boundary. Returns the estimate even
/// when the interval budget is exhausted; check `converged`.
template <class T = double, class F>
Result<T> integrate(F&& f, std::span<const double> points, const Options& opt = {}) {
  std::priority_queue<detail::Panel<T>> heap;
  Result<T> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] <= points[i]) continue;
    heap.push(detail::gauss_kronrod_15<T>(f, points[i], points[i + 1]));
  }
  auto totals = [&heap] {
    // std::priority_queue has no iteration; copy is fine at these sizes.
    auto copy = heap;
    T v{};
    double e = 0.0;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair<T, double>{v, e};
  };

  T value{};
  double error = 0.0;
  {
    auto [v, e] = totals();
    value = v;
    error = e;
  }
  using std::abs;
  while (!heap.empty()) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * abs(value));
    if (error <= target) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(heap.size()) >= opt.max_intervals) break;
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval no longer splittable
    heap.pop();
    const auto left = detail::gauss_kronrod_15<T>(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15<T>(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  auto [v, e] = totals();
  out.value = v;
  out.error = e;
  out.intervals = static_cast<int>(heap.size());
  if (heap.empty()) out.converged = true;
  if (!out.converged) {
    out.converged = e <= std::max(opt.abs_tol, opt.rel_tol * abs(v));
  }
  return out;
}

template <class T = double, class F>
Result<T> integrate(F&& f, double a, double b, const Options& opt = {}) {
  const double pts[2] = {a, b};
  return integrate<T>(std::forward<F>(f), std::span<const double>(pts), opt);
}

/// Fixed 16-point Gauss-Legendre rule on [a, b]: calls visit(node, weight).
template <class Visit>
void gauss_legendre_16(double a, double b, Visit&& visit) {
  using rule = boost::math::quadrature::gauss<double, 16>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    visit(mid + half * x[i], half * w[i]);
    visit(mid - half * x[i], half * w[i]);
  }
}

}  // namespace dipolefield::quadrature
