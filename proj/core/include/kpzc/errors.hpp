#pragma once

#include <stdexcept>
#include <string>

namespace kpzc {

/// A caller broke a documented precondition (e.g. truncation depth above the
/// address depth, a depth-0 node weight).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An enumeration would exceed its configured node budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The dimension estimator could not bracket a root of the scaling slope.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, std::string diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace kpzc
