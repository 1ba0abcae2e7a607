#include "klstoch/reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "klstoch/errors.hpp"
#include "klstoch/stieltjes.hpp"

namespace klstoch::reference {

Matrix kernel_matrix(const KernelSpec& spec, std::span<const double> grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = spec(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]);
    }
  }
  return m;
}

std::vector<double> diagonal_compressions(const ONBSpec& onb, const KernelSpec& spec) {
  const auto& x = onb.rule().nodes();
  const auto& w = onb.rule().weights();
  const auto& psi = onb.samples();
  std::vector<double> d;
  for (Eigen::Index k = 0; k < psi.rows(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        s += w[i] * w[j] * psi(k, static_cast<Eigen::Index>(i)) * spec(x[i], x[j]) *
             psi(k, static_cast<Eigen::Index>(j));
      }
    }
    d.push_back(s);
  }
  std::sort(d.begin(), d.end(), std::greater<>());
  return d;
}

RowMatrix synthesize(const KLBasis& basis, const RowMatrix& coefficients) {
  const auto& phi = basis.eigenfunctions();
  const Eigen::Index K = coefficients.cols();
  require(K <= phi.rows(), ErrorCategory::Range, "more coefficients than modes");
  RowMatrix out = RowMatrix::Zero(coefficients.rows(), phi.cols());
  for (Eigen::Index p = 0; p < coefficients.rows(); ++p) {
    for (Eigen::Index i = 0; i < phi.cols(); ++i) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < K; ++k) {
        s += coefficients(p, k) * std::sqrt(basis.eigenvalues()[static_cast<std::size_t>(k)]) * phi(k, i);
      }
      out(p, i) = s;
    }
  }
  return out;
}

double variance_spectral(const FunctionSpec& f, const KLBasis& basis, double t0, double t, std::size_t K) {
  require(K <= basis.size(), ErrorCategory::Range, "K exceeds the retained modes");
  double s = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double c = stieltjes_integral(f, Integrator::mode(basis, k), t0, t);
    s += basis.eigenvalues()[k] * c * c;
  }
  return s;
}

}  // namespace klstoch::reference
