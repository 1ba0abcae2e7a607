#pragma once

#include <cmath>
#include <optional>
#include <random>

#include "klstoch/errors.hpp"

namespace klstoch::testing {

/// Category of the klstoch::Error thrown by `body`, or nullopt.
template <class F>
std::optional<ErrorCategory> thrown_category(F&& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.category();
  }
  return std::nullopt;
}

/// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace klstoch::testing
