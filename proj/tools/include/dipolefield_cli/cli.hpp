#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dipolefield/field_kernel.hpp"

namespace dipolefield::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kComparisonFailed = 1,
  kUsageError = 2,
  kNumericalError = 3,
};

/// Environment variable consulted for the output directory when neither
/// --out nor a config file sets one.
inline constexpr const char* kOutputDirEnv = "DIPOLEFIELD_OUTPUT_DIR";

struct ConstantsTable {
  OrientationMode mode = OrientationMode::kParallelZ;
  double d_infinity = 0.0;
  double half_width = 0.0;         ///< Gamma = pi D_inf
  double shift = 0.0;              ///< g_c
  double shift_closed_form = 0.0;  ///< NaN when no closed form is known
  double width_coefficient = 0.0;  ///< Gamma F0 / (C rho) = Gamma 4 pi / 3
  double center_coefficient = 0.0; ///< g_c F0 / (C rho)
};

ConstantsTable constants_table(OrientationMode mode);

/// Full command line, argv[0] included. Never throws; errors are reported on
/// `err` and mapped to an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dipolefield::cli
