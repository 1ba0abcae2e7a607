#pragma once

// Deterministic reduction helpers shared by the OpenMP kernels. Every
// reduction here has a fixed combination order that does not depend on the
// number of worker threads.

#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

namespace klstoch {

/// Pairwise (cascade) summation with a fixed tree shape.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t leaf = 16;
  if (values.size() <= leaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Count, mean and centered second moment of a sample; merged with Chan's
/// update so partial results from disjoint blocks combine exactly.
struct RunningMoments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  static RunningMoments merge(const RunningMoments& lhs, const RunningMoments& rhs) {
    if (lhs.count == 0.0) return rhs;
    if (rhs.count == 0.0) return lhs;
    RunningMoments out;
    out.count = lhs.count + rhs.count;
    const double delta = rhs.mean - lhs.mean;
    out.mean = lhs.mean + delta * (rhs.count / out.count);
    out.m2 = lhs.m2 + rhs.m2 + delta * delta * (lhs.count * rhs.count / out.count);
    return out;
  }

  double sample_variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
  double standard_error() const { return count > 1.0 ? std::sqrt(sample_variance() / count) : 0.0; }
};

inline RunningMoments pairwise_merge(std::span<const RunningMoments> parts) {
  if (parts.empty()) return {};
  if (parts.size() == 1) return parts.front();
  const std::size_t half = parts.size() / 2;
  return RunningMoments::merge(pairwise_merge(parts.first(half)), pairwise_merge(parts.subspan(half)));
}

/// Holds the first exception raised inside an OpenMP region so it can be
/// rethrown on the calling thread once the region has joined.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& body) noexcept {
    try {
      body();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

/// Sets the OpenMP worker count; values < 1 leave the runtime default.
void set_thread_count(int threads);
int thread_count();

}  // namespace klstoch
