#pragma once

#include <cstddef>
#include <string>

#include "dipolefield/limit_dist.hpp"
#include "dipolefield/montecarlo.hpp"

namespace dipolefield {

struct CompareOptions {
  double max_z = 5.0;           ///< PASS requires max |z| <= max_z
  double chi2_per_dof_low = 0.8;
  double chi2_per_dof_high = 1.3;
  double min_expected = 10.0;   ///< bins with fewer expected counts are excluded
};

/// Agreement between a histogram and a tabulated density.
struct ComparisonReport {
  double sup_norm = 0.0;        ///< max |height - bin-averaged density| over covered bins
  double max_z = 0.0;           ///< max |observed - expected| / sqrt(expected)
  double max_z_location = 0.0;  ///< centre of the bin attaining max_z
  double chi2 = 0.0;
  std::size_t dof = 0;
  std::size_t excluded_bins = 0;   ///< expected count below min_expected
  std::size_t uncovered_bins = 0;  ///< bin not inside the curve grid
  CompareOptions options;
  bool pass = false;

  double chi2_per_dof() const noexcept { return dof > 0 ? chi2 / static_cast<double>(dof) : 0.0; }
  std::string verdict() const { return pass ? "PASS" : "FAIL"; }
};

/// Expected counts come from the exact bin integral of the curve's linear
/// interpolant times the number of realizations. Throws DomainError when no
/// bin is both covered and sufficiently populated.
ComparisonReport compare(const FieldHistogram& histogram, const DistributionCurve& curve,
                         const CompareOptions& opt = {});

}  // namespace dipolefield
