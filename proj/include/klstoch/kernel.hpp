#pragma once

// Covariance kernels K(s, t) = E(X_s X_t) of zero-mean second-order
// processes, together with their sampled matrices on grids and partitions.

#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "klstoch/interval.hpp"
#include "klstoch/types.hpp"

namespace klstoch {

struct BrownianMotion {};

struct FractionalBrownian {
  double hurst;  // in (0, 1)
};

struct OrnsteinUhlenbeck {
  double theta;  // mean reversion rate, > 0
  double sigma;  // diffusion, > 0
};

/// Kernel given by samples on a grid, bilinearly interpolated between nodes.
///
/// Bounded variation of t -> K(s, t) cannot be verified from a finite table,
/// so admissibility of the table is the caller's responsibility.
class Tabulated {
 public:
  Tabulated(std::vector<double> grid, Matrix values);

  const std::vector<double>& grid() const noexcept { return grid_; }
  const Matrix& values() const noexcept { return values_; }
  double operator()(double s, double t) const;

 private:
  std::vector<double> grid_;
  Matrix values_;
};

class KernelSpec {
 public:
  using Variant = std::variant<BrownianMotion, FractionalBrownian, OrnsteinUhlenbeck, Tabulated>;

  static KernelSpec brownian();
  static KernelSpec fractional_brownian(double hurst);
  static KernelSpec ornstein_uhlenbeck(double theta, double sigma);
  static KernelSpec tabulated(std::vector<double> grid, Matrix values);

  const Variant& variant() const noexcept { return variant_; }
  std::string name() const;

  /// E(X_s X_t); symmetric bit-for-bit in its arguments.
  double operator()(double s, double t) const;

  /// True when t lies in the kernel's natural domain.
  bool in_domain(double t) const;

 private:
  explicit KernelSpec(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

double eval_kernel(const KernelSpec& spec, double s, double t);

/// M[i][j] = K(grid[i], grid[j]); each unordered pair is evaluated once.
Matrix kernel_matrix(const KernelSpec& spec, std::span<const double> grid);

/// C[i][j] = E(dX_i dX_j) for the n increments of the partition.
Matrix increment_covariance(const KernelSpec& spec, const Partition& partition);

/// Smallest and largest eigenvalue of a symmetric matrix, and whether
/// min >= -eps * max.
struct PsdReport {
  double min_eigenvalue;
  double max_eigenvalue;
  bool positive_semidefinite;
};
PsdReport psd_report(const Matrix& symmetric, double eps = 1e-10);

/// Reads a tabulated kernel from CSV: first row is the grid, the remaining
/// rows are the matrix rows.
KernelSpec load_tabulated_csv(const std::filesystem::path& path);

}  // namespace klstoch
