#include "klstoch/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "klstoch/errors.hpp"
#include "klstoch/parallel.hpp"
#include "klstoch/stieltjes.hpp"

namespace klstoch {

namespace {

std::size_t block_count(std::size_t M) { return (M + kPathBlock - 1) / kPathBlock; }

std::size_t block_rows(std::size_t M, std::size_t block) {
  return std::min(kPathBlock, M - block * kPathBlock);
}

std::vector<std::size_t> all_columns(const KLBasis& basis) {
  std::vector<std::size_t> cols(basis.rule().size());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  return cols;
}

// Row k holds sqrt(lambda_k) phi_k at the selected columns.
RowMatrix scaled_modes(const KLBasis& basis, std::size_t K, std::span<const std::size_t> columns) {
  RowMatrix out(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < K; ++k) {
    const double scale = std::sqrt(basis.eigenvalues()[k]);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) =
          scale * basis.eigenfunctions()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(columns[c]));
    }
  }
  return out;
}

RowMatrix apply_modes(const RowMatrix& coefficients, const RowMatrix& modes) {
  if (modes.rows() == 0) return RowMatrix::Zero(coefficients.rows(), modes.cols());
  RowMatrix out(coefficients.rows(), modes.cols());
  out.noalias() = coefficients * modes;
  return out;
}

void check_counts(const KLBasis& basis, std::size_t K, std::size_t M) {
  require(M >= 1, ErrorCategory::Argument, "path count must be positive");
  require(K <= basis.size(), ErrorCategory::Range, "K exceeds the retained modes");
}

PathEnsemble block_ensemble(const KLBasis& basis, std::size_t K, std::size_t M, const RandomSource& source,
                            std::size_t block, std::span<const std::size_t> columns, const RowMatrix& modes) {
  PathEnsemble ens;
  ens.basis_id = basis.id();
  ens.grid.reserve(columns.size());
  for (std::size_t c : columns) ens.grid.push_back(basis.rule().nodes()[c]);
  ens.coefficients = draw_coefficients(source, block, block_rows(M, block), K);
  ens.paths = apply_modes(ens.coefficients, modes);
  return ens;
}

// (1/sqrt(lambda_k)) w_i phi_k(x_i), arranged n x K for right multiplication.
Matrix projection_matrix(const KLBasis& basis, std::size_t K) {
  const auto n = static_cast<Eigen::Index>(basis.rule().size());
  Matrix out(n, static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const double inv = 1.0 / std::sqrt(basis.eigenvalues()[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, static_cast<Eigen::Index>(k)) =
          inv * basis.rule().weights()[static_cast<std::size_t>(i)] * basis.eigenfunctions()(static_cast<Eigen::Index>(k), i);
    }
  }
  return out;
}

RunningMoments integral_moments(const FunctionSpec& f, const RowMatrix& paths, std::span<const std::size_t> columns,
                                const Partition& partition) {
  RunningMoments m;
  std::vector<double> path(columns.size());
  for (Eigen::Index r = 0; r < paths.rows(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) path[c] = paths(r, static_cast<Eigen::Index>(columns[c]));
    const double s = riemann_stieltjes_sum(f, path, partition);
    m.push(s * s);
  }
  return m;
}

}  // namespace

std::mt19937_64 RandomSource::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

RowMatrix draw_coefficients(const RandomSource& source, std::size_t block, std::size_t rows, std::size_t K) {
  auto engine = source.substream(block).engine();
  std::normal_distribution<double> gauss(0.0, 1.0);
  RowMatrix z(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(K));
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    for (Eigen::Index k = 0; k < z.cols(); ++k) z(r, k) = gauss(engine);
  }
  return z;
}

RowMatrix synthesize(const KLBasis& basis, const RowMatrix& coefficients, std::span<const std::size_t> columns) {
  const auto K = static_cast<std::size_t>(coefficients.cols());
  require(K <= basis.size(), ErrorCategory::Range, "K exceeds the retained modes");
  for (std::size_t c : columns) {
    require(c < basis.rule().size(), ErrorCategory::Range, "grid column out of range");
  }
  return apply_modes(coefficients, scaled_modes(basis, K, columns));
}

PathEnsemble simulate_block(const KLBasis& basis, std::size_t K, std::size_t M, const RandomSource& source,
                            std::size_t block, std::span<const std::size_t> columns) {
  check_counts(basis, K, M);
  require(block < block_count(M), ErrorCategory::Range, "block index out of range");
  const std::vector<std::size_t> all = columns.empty() ? all_columns(basis) : std::vector<std::size_t>{};
  const std::span<const std::size_t> cols = columns.empty() ? std::span<const std::size_t>(all) : columns;
  return block_ensemble(basis, K, M, source, block, cols, scaled_modes(basis, K, cols));
}

PathEnsemble simulate_paths(const KLBasis& basis, std::size_t K, std::size_t M, const RandomSource& source) {
  check_counts(basis, K, M);
  const auto cols = all_columns(basis);
  const RowMatrix modes = scaled_modes(basis, K, cols);
  PathEnsemble out;
  out.basis_id = basis.id();
  out.grid = basis.rule().nodes();
  out.paths.resize(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(cols.size()));
  out.coefficients.resize(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(K));
  const auto blocks = static_cast<std::ptrdiff_t>(block_count(M));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const auto block = static_cast<std::size_t>(b);
    const PathEnsemble part = block_ensemble(basis, K, M, source, block, cols, modes);
    const auto first = static_cast<Eigen::Index>(block * kPathBlock);
    out.paths.middleRows(first, part.paths.rows()) = part.paths;
    out.coefficients.middleRows(first, part.coefficients.rows()) = part.coefficients;
  }
  return out;
}

RowMatrix extract_coefficients(const PathEnsemble& ensemble, const KLBasis& basis, std::size_t K) {
  require(K <= basis.size(), ErrorCategory::Range, "K exceeds the retained modes");
  const auto& nodes = basis.rule().nodes();
  require(ensemble.grid.size() == nodes.size(), ErrorCategory::Argument,
          "ensemble grid does not match the basis grid");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    require(std::abs(ensemble.grid[i] - nodes[i]) <= 1e-12 * std::max(1.0, std::abs(nodes[i])),
            ErrorCategory::Argument, "ensemble grid does not match the basis grid");
  }
  const Matrix projection = projection_matrix(basis, K);
  const auto M = static_cast<std::size_t>(ensemble.paths.rows());
  RowMatrix z(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(K));
  if (M == 0 || K == 0) return z;
  const auto blocks = static_cast<std::ptrdiff_t>(block_count(M));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const auto first = static_cast<Eigen::Index>(static_cast<std::size_t>(b) * kPathBlock);
    const auto rows = static_cast<Eigen::Index>(block_rows(M, static_cast<std::size_t>(b)));
    z.middleRows(first, rows).noalias() = ensemble.paths.middleRows(first, rows) * projection;
  }
  return z;
}

std::vector<std::size_t> partition_columns(std::span<const double> grid, const Partition& partition) {
  std::vector<std::size_t> cols;
  cols.reserve(partition.size());
  for (double p : partition.points()) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), p - 1e-12 * std::max(1.0, std::abs(p)));
    if (it == grid.end() || std::abs(*it - p) > 1e-12 * std::max(1.0, std::abs(p))) {
      fail(ErrorCategory::Argument, "partition point is not a grid point of the ensemble");
    }
    cols.push_back(static_cast<std::size_t>(it - grid.begin()));
  }
  return cols;
}

Estimate empirical_integral_variance(const FunctionSpec& f, const PathEnsemble& ensemble, const Partition& partition) {
  const std::size_t M = ensemble.size();
  require(M >= 2, ErrorCategory::InsufficientSample, "empirical variance needs at least two paths");
  const auto cols = partition_columns(ensemble.grid, partition);
  std::vector<RunningMoments> parts(block_count(M));
  const auto blocks = static_cast<std::ptrdiff_t>(parts.size());
  ExceptionSlot errors;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    errors.run([&] {
      const auto block = static_cast<std::size_t>(b);
      const auto first = static_cast<Eigen::Index>(block * kPathBlock);
      const auto rows = static_cast<Eigen::Index>(block_rows(M, block));
      parts[block] = integral_moments(f, ensemble.paths.middleRows(first, rows), cols, partition);
    });
  }
  errors.rethrow();
  const RunningMoments total = pairwise_merge(parts);
  return {total.mean, total.standard_error()};
}

double truncated_discrete_variance(const FunctionSpec& f, const KLBasis& basis, std::size_t K,
                                   const Partition& partition) {
  require(K <= basis.size(), ErrorCategory::Range, "K exceeds the retained modes");
  const auto columns = partition_columns(basis.rule().nodes(), partition);
  const auto& phi = basis.eigenfunctions();
  std::vector<double> terms(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < columns.size(); ++i) {
      const double inc = phi(row, static_cast<Eigen::Index>(columns[i + 1])) - phi(row, static_cast<Eigen::Index>(columns[i]));
      c += f(partition.points()[i]) * inc;
    }
    terms[k] = basis.eigenvalues()[k] * c * c;
  }
  return pairwise_sum(terms);
}

double truncation_error(const KLBasis& basis, std::size_t N) {
  if (N >= basis.size()) return 0.0;
  return pairwise_sum(std::span<const double>(basis.eigenvalues()).subspan(N));
}

std::vector<Estimate> stream_integral_variance(std::span<const FunctionSpec> integrands, const KLBasis& basis,
                                               std::size_t K, std::size_t M, const RandomSource& source,
                                               const Partition& partition) {
  check_counts(basis, K, M);
  require(M >= 2, ErrorCategory::InsufficientSample, "empirical variance needs at least two paths");
  const auto cols = partition_columns(basis.rule().nodes(), partition);
  const RowMatrix modes = scaled_modes(basis, K, cols);
  std::vector<std::size_t> local(cols.size());
  for (std::size_t i = 0; i < local.size(); ++i) local[i] = i;

  const std::size_t nb = block_count(M);
  std::vector<std::vector<RunningMoments>> parts(integrands.size(), std::vector<RunningMoments>(nb));
  ExceptionSlot errors;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
    errors.run([&] {
      const auto block = static_cast<std::size_t>(b);
      const PathEnsemble part = block_ensemble(basis, K, M, source, block, cols, modes);
      for (std::size_t f = 0; f < integrands.size(); ++f) {
        parts[f][block] = integral_moments(integrands[f], part.paths, local, partition);
      }
    });
  }
  errors.rethrow();
  std::vector<Estimate> out;
  for (const auto& p : parts) {
    const RunningMoments total = pairwise_merge(p);
    out.push_back({total.mean, total.standard_error()});
  }
  return out;
}

GramEstimate stream_coefficient_gram(const KLBasis& basis, std::size_t K, std::size_t M, const RandomSource& source) {
  check_counts(basis, K, M);
  require(M >= 2, ErrorCategory::InsufficientSample, "Gram estimate needs at least two paths");
  const auto cols = all_columns(basis);
  const RowMatrix modes = scaled_modes(basis, K, cols);
  const std::size_t nb = block_count(M);
  const std::size_t entries = K * K;
  std::vector<std::vector<RunningMoments>> parts(entries, std::vector<RunningMoments>(nb));
  ExceptionSlot errors;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
    errors.run([&] {
      const auto block = static_cast<std::size_t>(b);
      const PathEnsemble part = block_ensemble(basis, K, M, source, block, cols, modes);
      const RowMatrix z = extract_coefficients(part, basis, K);
      for (std::size_t j = 0; j < K; ++j) {
        for (std::size_t k = j; k < K; ++k) {
          RunningMoments m;
          for (Eigen::Index r = 0; r < z.rows(); ++r) {
            m.push(z(r, static_cast<Eigen::Index>(j)) * z(r, static_cast<Eigen::Index>(k)));
          }
          parts[j * K + k][block] = m;
        }
      }
    });
  }
  errors.rethrow();
  GramEstimate out{Matrix::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K)),
                   Matrix::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K))};
  for (std::size_t j = 0; j < K; ++j) {
    for (std::size_t k = j; k < K; ++k) {
      const RunningMoments total = pairwise_merge(parts[j * K + k]);
      const auto jj = static_cast<Eigen::Index>(j);
      const auto kk = static_cast<Eigen::Index>(k);
      out.mean(jj, kk) = out.mean(kk, jj) = total.mean;
      out.std_error(jj, kk) = out.std_error(kk, jj) = total.standard_error();
    }
  }
  return out;
}

Estimate stream_truncation_error(const KLBasis& basis, std::size_t K, std::size_t N, std::size_t M,
                                 const RandomSource& source) {
  check_counts(basis, K, M);
  require(N <= K, ErrorCategory::Argument, "truncation level must not exceed K");
  require(M >= 2, ErrorCategory::InsufficientSample, "truncation estimate needs at least two paths");
  const auto cols = all_columns(basis);
  const RowMatrix modes = scaled_modes(basis, K, cols);
  const RowMatrix head = scaled_modes(basis, N, cols);
  const auto& w = basis.rule().weights();
  const std::size_t nb = block_count(M);
  std::vector<RunningMoments> parts(nb);
  ExceptionSlot errors;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
    errors.run([&] {
      const auto block = static_cast<std::size_t>(b);
      const PathEnsemble part = block_ensemble(basis, K, M, source, block, cols, modes);
      const RowMatrix z = extract_coefficients(part, basis, N);
      const RowMatrix residual = part.paths - apply_modes(z, head);
      RunningMoments m;
      for (Eigen::Index r = 0; r < residual.rows(); ++r) {
        double norm = 0.0;
        for (Eigen::Index i = 0; i < residual.cols(); ++i) {
          norm += w[static_cast<std::size_t>(i)] * residual(r, i) * residual(r, i);
        }
        m.push(norm);
      }
      parts[block] = m;
    });
  }
  errors.rethrow();
  const RunningMoments total = pairwise_merge(parts);
  return {total.mean, total.standard_error()};
}

}  // namespace klstoch
