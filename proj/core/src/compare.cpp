#include "dipolefield/compare.hpp"

#include <cmath>

#include "dipolefield/errors.hpp"

namespace dipolefield {

ComparisonReport compare(const FieldHistogram& histogram, const DistributionCurve& curve, const CompareOptions& opt) {
  if (histogram.realizations == 0) throw DomainError("histogram is empty");
  if (histogram.counts.size() != histogram.binning.bins) throw DomainError("histogram counts do not match its binning");

  ComparisonReport report;
  report.options = opt;
  const double m = static_cast<double>(histogram.realizations);
  const double width = histogram.binning.width();
  // Bins may straddle the grid edge by round-off only.
  const double slack = 1e-9 * width;

  for (std::size_t i = 0; i < histogram.binning.bins; ++i) {
    const double lo = histogram.binning.left(i);
    const double hi = histogram.binning.right(i);
    if (lo < curve.grid.min - slack || hi > curve.grid.max + slack) {
      ++report.uncovered_bins;
      continue;
    }
    const double mass = curve.integrate(lo, hi);
    const double model_height = mass / width;
    report.sup_norm = std::max(report.sup_norm, std::abs(histogram.normalized_height(i) - model_height));

    const double expected = m * mass;
    if (expected < opt.min_expected) {
      ++report.excluded_bins;
      continue;
    }
    const double resid = static_cast<double>(histogram.counts[i]) - expected;
    const double z = std::abs(resid) / std::sqrt(expected);
    if (z > report.max_z) {
      report.max_z = z;
      report.max_z_location = 0.5 * (lo + hi);
    }
    report.chi2 += resid * resid / expected;
    ++report.dof;
  }
  if (report.dof == 0) {
    throw DomainError("no histogram bin is covered by the curve with expected count >= " +
                      std::to_string(opt.min_expected));
  }
  const double r = report.chi2_per_dof();
  report.pass = report.max_z <= opt.max_z && r >= opt.chi2_per_dof_low && r <= opt.chi2_per_dof_high;
  return report;
}

}  // namespace dipolefield
