#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dipolefield/field_kernel.hpp"
#include "dipolefield/limit_dist.hpp"
#include "dipolefield/philox.hpp"

namespace dipolefield {

/// Uniform bins over [min, max).
struct Binning {
  double min = -8.0;
  double max = 8.0;
  std::size_t bins = 401;

  double width() const noexcept { return (max - min) / static_cast<double>(bins); }
  double left(std::size_t i) const noexcept { return min + width() * static_cast<double>(i); }
  double right(std::size_t i) const noexcept { return min + width() * static_cast<double>(i + 1); }
  void validate() const;
};

/// [-8, 8] with 401 bins for eps = 0; +-6 standard deviations of the
/// finite-variance law otherwise.
Binning default_binning(OrientationMode mode, double epsilon);

struct SimulationSpec {
  std::uint64_t n_dipoles = 10000;
  std::uint64_t realizations = 200000;
  double epsilon = 0.0;
  OrientationMode mode = OrientationMode::kParallelZ;
  std::uint64_t seed = 1;
  Binning binning{};

  void validate() const;
};

/// One-pass mean/variance (Welford) with Chan's pairwise merge.
class RunningStats {
 public:
  void push(double x) noexcept;
  void merge(const RunningStats& other) noexcept;
  /// Fold in a batch summarized by (count, sum, sum of squared deviations).
  void merge_moments(std::uint64_t count, double mean, double m2) noexcept;

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double standard_error() const noexcept;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct HistogramMeta {
  OrientationMode mode = OrientationMode::kParallelZ;
  double epsilon = 0.0;
  std::uint64_t n_dipoles = 0;
  std::uint64_t seed = 0;
  std::string source = "simulation";
};

/// Binned empirical distribution of the summed reduced field.
struct FieldHistogram {
  Binning binning;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;
  std::uint64_t realizations = 0;
  RunningStats field;    ///< streaming moments of the total g
  RunningStats angular;  ///< moments of the individual angular factors d_i
  HistogramMeta meta;

  FieldHistogram() = default;
  explicit FieldHistogram(const Binning& b);

  void add(double g) noexcept;
  /// Adds counts and under/overflow; moments are merged by the caller in a
  /// fixed order.
  void merge_counts(const FieldHistogram& other);
  double normalized_height(std::size_t bin) const noexcept;
  /// The sample variance of g estimates a finite quantity only when eps > 0.
  bool variance_converged() const noexcept { return meta.epsilon > 0.0; }
};

/// Draws one dipole: x uniform on [eps, N + eps], directions uniform on the
/// sphere (mu1, and mu2, phi in random mode).
DipolePlacement sample_placement(PhiloxStream& rng, const SimulationSpec& spec) noexcept;

/// Sum over N independent dipoles of d_i / x_i. When `angular` is given the
/// individual angular factors are accumulated into it.
double sample_realization(const SimulationSpec& spec, PhiloxStream& rng, RunningStats* angular = nullptr);

struct RunOptions {
  unsigned workers = 0;                   ///< 0: hardware concurrency
  std::uint64_t block_size = 1024;        ///< realizations per RNG stream
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
};

/// M independent realizations histogrammed. Realizations are grouped in
/// fixed blocks, each drawn from stream (seed, block index); the result is
/// bit-identical for any worker count.
FieldHistogram run_simulation(const SimulationSpec& spec, const RunOptions& opt = {});

/// M draws from a tabulated curve by inverse-CDF sampling of its piecewise
/// linear interpolant. Mass the grid does not hold (1 - trapezoid mass) is
/// sent to underflow/overflow in equal parts.
FieldHistogram histogram_from_curve(const DistributionCurve& curve, const Binning& binning,
                                    std::uint64_t realizations, std::uint64_t seed);

}  // namespace dipolefield
