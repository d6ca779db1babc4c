#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fcp {

/// Raised when a derivative is requested at a point where the penalty is not
/// differentiable. Callers pick a subgradient from the interval instead.
class kink_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class dimension_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A loss or gradient evaluation produced NaN/Inf.
class numerical_failure : public std::runtime_error {
public:
  numerical_failure(const std::string &what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) +
                           ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

private:
  std::size_t iteration_;
};

/// Precondition of an internal step was violated; unreachable from the
/// public drivers.
class logic_violation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace fcp
