#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

/// Invalid parameter or grid configuration. Message names the violated
/// invariant. CLI maps this to exit code 1.
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Grid does not satisfy a coverage precondition, or the integrated
/// probability over it falls below tolerance.
class grid_too_small_error : public validation_error {
 public:
  explicit grid_too_small_error(const std::string& what) : validation_error(what) {}
};

/// Evaluation requested at a point where the formula is singular.
class singularity_error : public std::domain_error {
 public:
  explicit singularity_error(const std::string& what) : std::domain_error(what) {}
};

/// Operation outside the regime the implementation covers.
class unsupported_regime_error : public std::domain_error {
 public:
  explicit unsupported_regime_error(const std::string& what) : std::domain_error(what) {}
};

/// Adaptive quadrature exhausted its subdivision budget before reaching the
/// requested tolerance. Carries the best value and the achieved error
/// estimate. CLI maps this to exit code 2.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double value, double error_estimate)
      : std::runtime_error(what), value_(value), error_estimate_(error_estimate) {}

  double value() const { return value_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double value_;
  double error_estimate_;
};

/// Filesystem failure while writing artifacts. CLI maps this to exit code 3.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qbm
