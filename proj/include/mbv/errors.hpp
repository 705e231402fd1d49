#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mbv {

// Bad arguments or malformed input files. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: overflow, undefined logarithm, non-convergence.
// The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver ran out of iterations. Carries the last iterate and the last
// objective decrease so callers can diagnose or restart.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                   double objective_gap)
      : NumericError(what),
        last_iterate_(std::move(last_iterate)),
        objective_gap_(objective_gap) {}

  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double objective_gap() const { return objective_gap_; }

 private:
  std::vector<double> last_iterate_;
  double objective_gap_;
};

}  // namespace mbv
