#pragma once

#include <stdexcept>
#include <string>

namespace dipolefield {

/// An argument lies outside the domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure (quadrature, cutoff search) did not reach its
/// requested tolerance. Carries the best estimate obtained.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double estimate, double error_estimate);

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

}  // namespace dipolefield
