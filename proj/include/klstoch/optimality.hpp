#pragma once

// Karhunen-Loeve optimality: diagonal compressions <psi_k, T psi_k> in
// competing orthonormal bases, trace dominance by partial eigenvalue sums,
// and partial entropy sums.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "klstoch/kernel.hpp"
#include "klstoch/quadrature.hpp"
#include "klstoch/spectral.hpp"
#include "klstoch/types.hpp"

namespace klstoch {

enum class OnbFamily { KL, FourierCosine, LegendreShifted, Haar };

std::string to_string(OnbFamily family);
OnbFamily onb_family_from_string(const std::string& name);

/// Quadrature on which the family's samples are exactly orthonormal.
QuadratureKind native_rule(OnbFamily family);

/// Orthonormal functions sampled on a quadrature grid (row i = psi_i).
class ONBSpec {
 public:
  ONBSpec(OnbFamily family, QuadratureRule rule, RowMatrix samples);

  OnbFamily family() const noexcept { return family_; }
  const QuadratureRule& rule() const noexcept { return rule_; }
  const RowMatrix& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(samples_.rows()); }
  std::string name() const { return to_string(family_); }

 private:
  OnbFamily family_;
  QuadratureRule rule_;
  RowMatrix samples_;
};

/// First `count` members of a closed-form family on the rule's grid:
/// cosine {1, sqrt2 cos(k pi (t-a)/(b-a))}, normalized shifted Legendre, or
/// Haar (power-of-two midpoint grid required).
ONBSpec make_onb(OnbFamily family, const QuadratureRule& rule, std::size_t count = 64);

/// The KL basis itself as a competitor (first `count` modes, all when 0).
ONBSpec kl_onb(const KLBasis& basis, std::size_t count = 0);

/// d_k = sum_ij w_i w_j psi_k(x_i) K(x_i, x_j) psi_k(x_j), sorted descending.
/// Rejects bases whose weighted Gram deviates from I by more than 1e-6.
std::vector<double> diagonal_compressions(const ONBSpec& onb, const KernelSpec& spec);

struct DominanceRow {
  std::size_t n;
  double sum_lambda;
  double sum_d;
  double margin;  // sum_lambda - sum_d
  bool pass;      // margin >= -1e-10
};

std::vector<DominanceRow> check_trace_dominance(std::span<const double> compressions,
                                                std::span<const double> eigenvalues,
                                                std::size_t n_max);
std::vector<DominanceRow> check_trace_dominance(const ONBSpec& onb, const KLBasis& basis,
                                                const KernelSpec& spec, std::size_t n_max);

struct EntropyValue {
  double value;       // -sum_{k<n} v_k log v_k of the normalized values
  double normalizer;  // factor the values were divided by
};

/// Partial entropy sum of values / normalizer (normalizer defaults to the
/// sum of all values). Entries below 1e-14 after normalization count as 0.
EntropyValue entropy_numbers(std::span<const double> values, std::size_t n,
                             std::optional<double> normalizer = std::nullopt);

/// sum_{k<n} beta(v_k / normalizer) with beta(t) = t log t.
double beta_partial_sum(std::span<const double> values, std::size_t n, double normalizer);

/// Top-K eigenvalues of the discretized operator by the variational
/// recursion: power iteration restricted to the orthogonal complement of the
/// modes already found.
std::vector<double> recursive_rayleigh(const KernelSpec& spec, const QuadratureRule& rule,
                                       std::size_t K);

}  // namespace klstoch
