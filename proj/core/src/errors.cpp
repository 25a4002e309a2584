#include "dipolefield/errors.hpp"

namespace dipolefield {

NumericalError::NumericalError(const std::string& what, double estimate, double error_estimate)
    : std::runtime_error(what), estimate_(estimate), error_estimate_(error_estimate) {}

}  // namespace dipolefield
