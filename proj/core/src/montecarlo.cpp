#include "dipolefield/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "dipolefield/errors.hpp"

namespace dipolefield {

void Binning::validate() const {
  if (!(std::isfinite(min) && std::isfinite(max) && min < max)) throw DomainError("binning requires finite g_min < g_max");
  if (bins < 2) throw DomainError("binning requires at least 2 bins");
}

Binning default_binning(OrientationMode mode, double epsilon) {
  if (epsilon <= 0.0) return {-8.0, 8.0, 401};
  const double half = 6.0 * std::sqrt(angular_second_moment(mode) / epsilon);
  return {-half, half, 401};
}

void SimulationSpec::validate() const {
  if (n_dipoles < 1) throw DomainError("n_dipoles must be >= 1");
  if (realizations < 1) throw DomainError("realizations must be >= 1");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be finite and >= 0");
  binning.validate();
}

void RunningStats::push(double x) noexcept {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge_moments(std::uint64_t count, double mean, double m2) noexcept {
  if (count == 0) return;
  if (count_ == 0) {
    count_ = count;
    mean_ = mean;
    m2_ = m2;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(count);
  const double n = na + nb;
  const double delta = mean - mean_;
  mean_ += delta * nb / n;
  m2_ += m2 + delta * delta * na * nb / n;
  count_ += count;
}

void RunningStats::merge(const RunningStats& other) noexcept { merge_moments(other.count_, other.mean_, other.m2_); }

double RunningStats::standard_error() const noexcept {
  return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
}

FieldHistogram::FieldHistogram(const Binning& b) : binning(b), counts(b.bins, 0) {}

void FieldHistogram::add(double g) noexcept {
  ++realizations;
  if (g < binning.min) {
    ++underflow;
    return;
  }
  const auto idx = static_cast<std::size_t>((g - binning.min) / binning.width());
  if (g >= binning.max || idx >= counts.size()) {
    ++overflow;
    return;
  }
  ++counts[idx];
}

void FieldHistogram::merge_counts(const FieldHistogram& other) {
  if (other.counts.size() != counts.size()) throw DomainError("cannot merge histograms with different binning");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  underflow += other.underflow;
  overflow += other.overflow;
  realizations += other.realizations;
}

double FieldHistogram::normalized_height(std::size_t bin) const noexcept {
  if (realizations == 0) return 0.0;
  return static_cast<double>(counts[bin]) / (static_cast<double>(realizations) * binning.width());
}

DipolePlacement sample_placement(PhiloxStream& rng, const SimulationSpec& spec) noexcept {
  DipolePlacement p;
  p.x = spec.epsilon + static_cast<double>(spec.n_dipoles) * rng.uniform_open();
  p.mu = 2.0 * rng.uniform_open() - 1.0;
  if (spec.mode == OrientationMode::kRandomIsotropic) {
    p.mu2 = 2.0 * rng.uniform_open() - 1.0;
    p.phi = 2.0 * std::numbers::pi * rng.uniform_open();
    if (p.phi >= 2.0 * std::numbers::pi) p.phi = 0.0;
  }
  return p;
}

double sample_realization(const SimulationSpec& spec, PhiloxStream& rng, RunningStats* angular) {
  double g = 0.0;
  double sum_d = 0.0;
  double sum_d2 = 0.0;
  for (std::uint64_t i = 0; i < spec.n_dipoles; ++i) {
    const DipolePlacement p = sample_placement(rng, spec);
    const double d = angular_factor(spec.mode, p);
    g += reduced_field_contribution(p.x, d);
    sum_d += d;
    sum_d2 += d * d;
  }
  if (angular != nullptr) {
    const double n = static_cast<double>(spec.n_dipoles);
    const double mean = sum_d / n;
    angular->merge_moments(spec.n_dipoles, mean, std::max(0.0, sum_d2 - n * mean * mean));
  }
  return g;
}

namespace {

struct BlockMoments {
  RunningStats field;
  RunningStats angular;
};

}  // namespace

FieldHistogram run_simulation(const SimulationSpec& spec, const RunOptions& opt) {
  spec.validate();
  if (opt.block_size < 1) throw DomainError("block_size must be >= 1");
  unsigned workers = opt.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.workers;
  const std::uint64_t blocks = (spec.realizations + opt.block_size - 1) / opt.block_size;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));

  const std::size_t needed = spec.binning.bins * sizeof(std::uint64_t) * (workers + 1) + blocks * sizeof(BlockMoments);
  if (needed > opt.memory_budget_bytes) {
    throw DomainError("simulation needs " + std::to_string(needed) + " bytes of histogram state, over the budget of " +
                      std::to_string(opt.memory_budget_bytes));
  }

  std::vector<BlockMoments> moments(blocks);
  std::vector<FieldHistogram> partial(workers, FieldHistogram(spec.binning));
  std::atomic<std::uint64_t> next{0};

  auto work = [&](unsigned w) {
    FieldHistogram& hist = partial[w];
    for (std::uint64_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
      PhiloxStream rng(spec.seed, b);
      const std::uint64_t first = b * opt.block_size;
      const std::uint64_t last = std::min(spec.realizations, first + opt.block_size);
      BlockMoments& m = moments[b];
      for (std::uint64_t r = first; r < last; ++r) {
        const double g = sample_realization(spec, rng, &m.angular);
        hist.add(g);
        m.field.push(g);
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  FieldHistogram out(spec.binning);
  for (const auto& h : partial) out.merge_counts(h);
  for (const auto& m : moments) {
    out.field.merge(m.field);
    out.angular.merge(m.angular);
  }
  out.meta = {spec.mode, spec.epsilon, spec.n_dipoles, spec.seed, "simulation"};
  return out;
}

FieldHistogram histogram_from_curve(const DistributionCurve& curve, const Binning& binning,
                                    std::uint64_t realizations, std::uint64_t seed) {
  binning.validate();
  const std::size_t n = curve.density.size();
  if (n < 2) throw DomainError("curve needs at least two grid points");
  const double h = curve.grid.step();

  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cumulative[i] = cumulative[i - 1] + 0.5 * (curve.density[i - 1] + curve.density[i]) * h;
  const double mass = cumulative.back();
  if (!(mass > 0.0)) throw DomainError("curve has no mass");
  const double tail = std::max(0.0, 1.0 - mass);
  const double scale = std::max(mass, 1.0);

  FieldHistogram out(binning);
  out.meta = {curve.meta.mode, curve.meta.epsilon, 0, seed, "resampled"};
  PhiloxStream rng(seed, 0);
  for (std::uint64_t r = 0; r < realizations; ++r) {
    const double u = rng.uniform_open();
    double g;
    if (u < 0.5 * tail) {
      g = -std::numeric_limits<double>::infinity();
    } else if (u > 1.0 - 0.5 * tail) {
      g = std::numeric_limits<double>::infinity();
    } else {
      const double target = (u - 0.5 * tail) * scale;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
      std::size_t i = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
      i = std::min(i, n - 2);
      // Invert p0 s + (p1 - p0) s^2 / (2h) = rest on the linear cell.
      const double p0 = curve.density[i];
      const double p1 = curve.density[i + 1];
      const double rest = target - cumulative[i];
      const double a = 0.5 * (p1 - p0) / h;
      double s;
      if (std::abs(a) < 1e-14 * std::max(p0, 1e-300)) {
        s = p0 > 0.0 ? rest / p0 : 0.5 * h;
      } else {
        const double denom = p0 + std::sqrt(std::max(0.0, p0 * p0 + 4.0 * a * rest));
        s = denom > 0.0 ? 2.0 * rest / denom : 0.0;
      }
      g = curve.grid.at(i) + std::clamp(s, 0.0, h);
    }
    out.add(g);
    if (std::isfinite(g)) out.field.push(g);
  }
  return out;
}

}  // namespace dipolefield
