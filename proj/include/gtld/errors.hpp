#pragma once

#include <stdexcept>
#include <string>

namespace gtld {

/// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An integral, sum or moment that does not exist (is infinite).
class divergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method stopped before meeting its tolerance.  The best
/// available estimate and its error bound are carried along.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

}  // namespace gtld
