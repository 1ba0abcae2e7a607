#pragma once

// Stieltjes integrals of deterministic integrands against eigenfunctions, and
// the second moment of int f dX through its spectral and discrete forms.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "klstoch/function.hpp"
#include "klstoch/interval.hpp"
#include "klstoch/kernel.hpp"
#include "klstoch/spectral.hpp"

namespace klstoch {

/// A continuous integrator g of bounded variation: either a callable (with
/// an optional derivative) or samples joined by straight lines.
class Integrator {
 public:
  static Integrator analytic(std::function<double(double)> value,
                             std::function<double(double)> derivative = {}, double frequency = 0.0);
  static Integrator sampled(std::vector<double> nodes, std::vector<double> values);
  /// Mode k of a basis: closed form when the basis has one, samples otherwise.
  static Integrator mode(const KLBasis& basis, std::size_t k);

  double value(double t) const;
  bool has_derivative() const noexcept { return static_cast<bool>(derivative_); }
  double derivative(double t) const { return derivative_(t); }
  bool is_sampled() const noexcept { return !nodes_.empty(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  double frequency() const noexcept { return frequency_; }

 private:
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
  double frequency_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> samples_;
};

struct StieltjesOptions {
  double rel_tol = 1e-10;
  int max_levels = 20;
};

/// int_{t0}^{t} f dg.
///
/// With a derivative available the value is int f g' ds by refined
/// Gauss-Legendre quadrature. For sampled g (linear between nodes) it is the
/// exact limit sum over cells of slope * int_cell f. Otherwise it is the
/// dyadic limit of left-endpoint sums (see stieltjes_refinement).
double stieltjes_integral(const FunctionSpec& f, const Integrator& g, double t0, double t,
                          const StieltjesOptions& options = {});

/// Limit of sum f(s_i)(g(s_{i+1}) - g(s_i)) over dyadic partitions of
/// [t0, t], accelerated by Richardson extrapolation in the mesh. Throws
/// ConvergenceError when successive approximants still differ by more than
/// rel_tol after max_levels halvings.
double stieltjes_refinement(const FunctionSpec& f, const Integrator& g, double t0, double t,
                            const StieltjesOptions& options = {});

/// Integration by parts: [f g]_{t0}^{t} - int g f' ds.
double stieltjes_by_parts(const FunctionSpec& f, const Integrator& g, double t0, double t);

/// S_pi(f, X) = sum_i f(t_i)(X_{t_{i+1}} - X_{t_i}) with path[i] = X_{t_i}.
double riemann_stieltjes_sum(const FunctionSpec& f, std::span<const double> path,
                             const Partition& partition);

/// sum_{k < K} lambda_k |int_{t0}^{t} f dphi_k|^2.
double variance_spectral(const FunctionSpec& f, const KLBasis& basis, double t0, double t,
                         std::size_t K);
double variance_spectral(const ComplexFunction& f, const KLBasis& basis, double t0, double t,
                         std::size_t K);

/// The K individual terms lambda_k |int f dphi_k|^2 (computed in parallel,
/// each term independently).
std::vector<double> spectral_terms(const FunctionSpec& f, const KLBasis& basis, double t0,
                                   double t, std::size_t K);

/// Exact E|S_pi(f, X)|^2 as the quadratic form sum_ij f(t_i) f(t_j) C_ij.
double variance_discrete(const FunctionSpec& f, const Partition& partition, const KernelSpec& spec);
double variance_discrete(const ComplexFunction& f, const Partition& partition,
                         const KernelSpec& spec);

/// The same second moment through the eigen-decomposition of C:
/// sum_k mu_k |<f, v_k>|^2.
double variance_discrete_eigen(const FunctionSpec& f, const Partition& partition,
                               const KernelSpec& spec);

struct AprioriBound {
  double lhs;    // variance_spectral
  double bound;  // lambda_1 * int |f'|^2
  bool holds(double slack = 1e-9) const { return lhs <= bound + slack; }
};

/// Spectral variance against lambda_1 int |f'|^2 for integrands vanishing at
/// both ends of [t0, t]; other integrands are rejected.
AprioriBound apriori_bound(const FunctionSpec& f, const KLBasis& basis, double t0, double t,
                           std::size_t K);

}  // namespace klstoch
