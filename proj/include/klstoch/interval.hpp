#pragma once

#include <cstddef>
#include <vector>

namespace klstoch {

/// Finite closed time interval [a, b] with a < b.
class Interval {
 public:
  Interval(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  bool contains(double t, double slack = 0.0) const noexcept {
    return t >= a_ - slack && t <= b_ + slack;
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double a_;
  double b_;
};

/// Strictly increasing points t_0 < t_1 < ... < t_n, n >= 1.
class Partition {
 public:
  explicit Partition(std::vector<double> points);

  /// n equal cells spanning the interval.
  static Partition uniform(const Interval& interval, std::size_t cells);

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t cells() const noexcept { return points_.size() - 1; }
  double front() const noexcept { return points_.front(); }
  double back() const noexcept { return points_.back(); }
  double delta(std::size_t i) const { return points_[i + 1] - points_[i]; }
  double mesh() const noexcept;

 private:
  std::vector<double> points_;
};

}  // namespace klstoch
