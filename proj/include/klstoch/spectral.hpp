#pragma once

// Karhunen-Loeve data of a covariance operator (T f)(t) = int K(t, s) f(s) ds:
// Nystrom discretization, closed-form Brownian eigenpairs and Mercer sums.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "klstoch/kernel.hpp"
#include "klstoch/quadrature.hpp"
#include "klstoch/types.hpp"

namespace klstoch {

/// Closed-form Brownian eigenpairs on [0, 1].
///
/// Dirichlet: phi_k = sqrt(2) sin(k pi t), lambda_k = 1 / (k pi)^2. This pair
/// vanishes at both ends but does not solve the eigen relation of the min
/// kernel; it is kept so the discrepancy can be reported.
/// VerifiedKL: phi_k = sqrt(2) sin((k - 1/2) pi t), lambda_k = ((k - 1/2) pi)^-2,
/// the actual eigenpairs of min(s, t).
enum class BrownianVariant { Dirichlet, VerifiedKL };

std::string to_string(BrownianVariant variant);
BrownianVariant brownian_variant_from_string(const std::string& name);

/// Discretized spectral data. Row k of `eigenfunctions` samples phi_{k+1} at
/// the rule's nodes; eigenvalues are positive and nonincreasing.
class KLBasis {
 public:
  KLBasis(QuadratureRule rule, std::vector<double> eigenvalues, RowMatrix eigenfunctions,
          std::optional<BrownianVariant> analytic = std::nullopt, std::string id = {});

  const Interval& interval() const noexcept { return rule_.interval(); }
  const QuadratureRule& rule() const noexcept { return rule_; }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  const RowMatrix& eigenfunctions() const noexcept { return eigenfunctions_; }
  const std::optional<BrownianVariant>& analytic_form() const noexcept { return analytic_; }
  const std::string& id() const noexcept { return id_; }
  std::size_t size() const noexcept { return eigenvalues_.size(); }

  /// phi_k(t) for 0-based mode k: closed form when available, otherwise the
  /// piecewise-linear interpolant of the node samples (exact at nodes).
  double eigenfunction(std::size_t k, double t) const;

  /// Closed-form phi_k'(t); empty for sampled bases.
  std::optional<double> eigenfunction_derivative(std::size_t k, double t) const;

  /// Angular frequency of a closed-form mode (0 for sampled bases).
  double mode_frequency(std::size_t k) const;

 private:
  QuadratureRule rule_;
  std::vector<double> eigenvalues_;
  RowMatrix eigenfunctions_;
  std::optional<BrownianVariant> analytic_;
  std::string id_;
};

/// Symmetrized Nystrom eigen-decomposition of the covariance operator.
///
/// A = W^1/2 M W^1/2 is diagonalized; modes with lambda <= tol * lambda_1 are
/// treated as the kernel of T and dropped. Eigenfunction samples W^-1/2 v are
/// orthonormal under the rule's weights and signed so their first sample with
/// |.| > 1e-12 is positive.
KLBasis nystrom_decompose(const KernelSpec& spec, const Interval& interval, std::size_t n,
                          QuadratureKind kind, double tol = 1e-12);

/// Same, on an explicit rule.
KLBasis nystrom_decompose(const KernelSpec& spec, const QuadratureRule& rule, double tol = 1e-12);

/// First K closed-form Brownian modes sampled on the rule's nodes (rule on [0, 1]).
KLBasis closed_form_brownian_basis(std::size_t K, BrownianVariant variant, const QuadratureRule& rule);

/// Truncated Mercer sum: sum_{k < K} lambda_k phi_k(s) phi_k(t).
double mercer_reconstruct(const KLBasis& basis, double s, double t, std::size_t K);

/// Truncated spectral value of E((X_t - X_s)(X_u - X_t)) for s < t < u.
double increment_cross_moment(const KLBasis& basis, double s, double t, double u, std::size_t K);

/// Weighted L2 norm of T phi_k - lambda_k phi_k, with T discretized by the
/// basis rule, for every retained mode.
std::vector<double> eigen_residuals(const KLBasis& basis, const KernelSpec& spec);

/// Weighted Gram matrix G[j][k] = sum_i w_i f_j(x_i) f_k(x_i) of sampled rows.
Matrix weighted_gram(const QuadratureRule& rule, const RowMatrix& rows);

/// max |G - I| over the first `count` rows (all rows when count is 0).
double orthonormality_error(const QuadratureRule& rule, const RowMatrix& rows, std::size_t count = 0);

/// sum_i w_i K(x_i, x_i): the discretized integral of the diagonal.
double discrete_trace(const KernelSpec& spec, const QuadratureRule& rule);

/// Projector onto the span of modes [first, last) in weighted coordinates,
/// P = V V^T with V = W^1/2 Phi^T. Independent of the eigenvector choice
/// inside a degenerate eigenspace.
Matrix spectral_projector(const KLBasis& basis, std::size_t first, std::size_t last);

}  // namespace klstoch
