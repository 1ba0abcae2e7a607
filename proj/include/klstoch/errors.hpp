#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace klstoch {

enum class ErrorCategory {
  Domain,
  InvalidKernel,
  Numeric,
  EmptySpectrum,
  Argument,
  Range,
  Convergence,
  Precondition,
  InvalidBasis,
  InsufficientSample,
  UndefinedEntropy,
  Config,
  Io,
};

std::string_view to_string(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Raised when a refinement sequence fails its Cauchy test; carries the
/// last two approximants.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last, double previous)
      : Error(ErrorCategory::Convergence, what), last_(last), previous_(previous) {}

  double last() const noexcept { return last_; }
  double previous() const noexcept { return previous_; }

 private:
  double last_;
  double previous_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& what) {
  throw Error(category, what);
}

inline void require(bool condition, ErrorCategory category, const std::string& what) {
  if (!condition) fail(category, what);
}

}  // namespace klstoch
