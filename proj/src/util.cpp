#include <omp.h>

#include "klstoch/errors.hpp"
#include "klstoch/parallel.hpp"

namespace klstoch {

std::string_view to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Domain: return "domain";
    case ErrorCategory::InvalidKernel: return "invalid-kernel";
    case ErrorCategory::Numeric: return "numeric";
    case ErrorCategory::EmptySpectrum: return "empty-spectrum";
    case ErrorCategory::Argument: return "argument";
    case ErrorCategory::Range: return "range";
    case ErrorCategory::Convergence: return "convergence";
    case ErrorCategory::Precondition: return "precondition";
    case ErrorCategory::InvalidBasis: return "invalid-basis";
    case ErrorCategory::InsufficientSample: return "insufficient-sample";
    case ErrorCategory::UndefinedEntropy: return "undefined-entropy";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Io: return "io";
  }
  return "unknown";
}

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace klstoch
