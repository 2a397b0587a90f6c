#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace trailnet {

/// Malformed input: bad JSON, schema violations, invalid network descriptions.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A network description failed validation. Carries every problem found.
class ValidationError : public InputError {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Well-formed input on which the requested computation cannot proceed.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// An exhaustive search would exceed its configured size guard.
class GuardExceeded : public DomainError {
 public:
  explicit GuardExceeded(const std::string& what) : DomainError(what) {}
};

/// The supplied choice functions violate an axiom a computation relies on
/// (detected as a non-monotone step, a missed convergence bound, ...).
class AxiomViolation : public DomainError {
 public:
  explicit AxiomViolation(const std::string& what) : DomainError(what) {}
};

}  // namespace trailnet
