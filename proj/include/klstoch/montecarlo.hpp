#pragma once

// Sample paths synthesized from Karhunen-Loeve data with i.i.d. standard
// Gaussian coefficients, and empirical checks of second-moment identities.
//
// Paths are produced in fixed blocks of kPathBlock rows; block b draws from
// stream (seed, stream + b), so ensembles do not depend on the worker count.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "klstoch/function.hpp"
#include "klstoch/interval.hpp"
#include "klstoch/spectral.hpp"
#include "klstoch/types.hpp"

namespace klstoch {

inline constexpr std::size_t kPathBlock = 1024;

struct RandomSource {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Engine seeded from (seed, stream) only.
  std::mt19937_64 engine() const;
  RandomSource substream(std::uint64_t offset) const { return {seed, stream + offset}; }
};

struct PathEnsemble {
  std::vector<double> grid;
  RowMatrix paths;         // M x grid.size()
  RowMatrix coefficients;  // M x K
  std::string basis_id;

  std::size_t size() const noexcept { return static_cast<std::size_t>(paths.rows()); }
};

/// rows x K standard Gaussian coefficients drawn from stream
/// source.stream + block, row by row.
RowMatrix draw_coefficients(const RandomSource& source, std::size_t block, std::size_t rows,
                            std::size_t K);

/// Paths X = Z diag(sqrt(lambda)) Phi restricted to the given grid columns.
RowMatrix synthesize(const KLBasis& basis, const RowMatrix& coefficients,
                     std::span<const std::size_t> columns);

/// M paths of the K-term expansion on the basis grid. K = 0 yields zero paths.
PathEnsemble simulate_paths(const KLBasis& basis, std::size_t K, std::size_t M,
                            const RandomSource& source);

/// Block `block` of a simulation of M paths, restricted to `columns` of the
/// basis grid (all columns when empty).
PathEnsemble simulate_block(const KLBasis& basis, std::size_t K, std::size_t M,
                            const RandomSource& source, std::size_t block,
                            std::span<const std::size_t> columns = {});

/// Z_k = lambda_k^-1/2 int phi_k X dt by the basis rule; M x K.
RowMatrix extract_coefficients(const PathEnsemble& ensemble, const KLBasis& basis, std::size_t K);

struct Estimate {
  double estimate;
  double std_error;
};

/// Mean of |S_pi(f, X)|^2 across paths with its standard error.
Estimate empirical_integral_variance(const FunctionSpec& f, const PathEnsemble& ensemble,
                                     const Partition& partition);

/// Exact E|S_pi(f, X_K)|^2 for the K-term expansion X_K:
/// sum_k lambda_k (sum_i f(t_i)(phi_k(t_{i+1}) - phi_k(t_i)))^2, with the
/// partition points on the basis grid.
double truncated_discrete_variance(const FunctionSpec& f, const KLBasis& basis, std::size_t K,
                                   const Partition& partition);

/// Tail sum_{k >= N} lambda_k of the retained spectrum (0-based N).
double truncation_error(const KLBasis& basis, std::size_t N);

/// Grid column of each partition point (exact match within 1e-12 relative).
std::vector<std::size_t> partition_columns(std::span<const double> grid, const Partition& partition);

// Streaming variants: blocks are generated, reduced and discarded, so M can
// exceed what fits in memory. Results match the materialized operations.

std::vector<Estimate> stream_integral_variance(std::span<const FunctionSpec> integrands,
                                               const KLBasis& basis, std::size_t K,
                                               std::size_t M, const RandomSource& source,
                                               const Partition& partition);

struct GramEstimate {
  Matrix mean;       // (1/M) Z^T Z with Z extracted from the paths
  Matrix std_error;  // entrywise standard error of the mean
};
GramEstimate stream_coefficient_gram(const KLBasis& basis, std::size_t K, std::size_t M,
                                     const RandomSource& source);

/// Mean over paths of ||X - X_N||^2 in L2(J) (rule quadrature), where X is the
/// K-term path and X_N its projection on the first N extracted modes.
Estimate stream_truncation_error(const KLBasis& basis, std::size_t K, std::size_t N,
                                 std::size_t M, const RandomSource& source);

}  // namespace klstoch
