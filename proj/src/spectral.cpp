#include "klstoch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "klstoch/errors.hpp"

namespace klstoch {

namespace {

double brownian_frequency(BrownianVariant variant, std::size_t k) {
  const double index = static_cast<double>(k + 1);
  return variant == BrownianVariant::Dirichlet ? index * std::numbers::pi
                                               : (index - 0.5) * std::numbers::pi;
}

double interpolate(const std::vector<double>& nodes, const double* samples, double t) {
  const std::size_t n = nodes.size();
  if (n == 1) return samples[0];
  std::size_t i = 0;
  if (t >= nodes.back()) {
    i = n - 2;
  } else if (t > nodes.front()) {
    i = static_cast<std::size_t>(std::upper_bound(nodes.begin(), nodes.end(), t) - nodes.begin()) - 1;
  }
  const double u = (t - nodes[i]) / (nodes[i + 1] - nodes[i]);
  if (u == 0.0) return samples[i];
  if (u == 1.0) return samples[i + 1];
  return samples[i] + u * (samples[i + 1] - samples[i]);
}

}  // namespace

std::string to_string(BrownianVariant variant) {
  return variant == BrownianVariant::Dirichlet ? "paper-dirichlet" : "verified-kl";
}

BrownianVariant brownian_variant_from_string(const std::string& name) {
  if (name == "paper-dirichlet") return BrownianVariant::Dirichlet;
  if (name == "verified-kl") return BrownianVariant::VerifiedKL;
  fail(ErrorCategory::Config, "unknown Brownian basis variant '" + name + "'");
}

KLBasis::KLBasis(QuadratureRule rule, std::vector<double> eigenvalues, RowMatrix eigenfunctions,
                 std::optional<BrownianVariant> analytic, std::string id)
    : rule_(std::move(rule)),
      eigenvalues_(std::move(eigenvalues)),
      eigenfunctions_(std::move(eigenfunctions)),
      analytic_(analytic),
      id_(std::move(id)) {
  require(static_cast<std::size_t>(eigenfunctions_.rows()) == eigenvalues_.size(),
          ErrorCategory::Argument, "one eigenfunction row per eigenvalue");
  require(static_cast<std::size_t>(eigenfunctions_.cols()) == rule_.size(), ErrorCategory::Argument,
          "eigenfunction samples must match the quadrature nodes");
  for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
    require(eigenvalues_[k] > 0.0, ErrorCategory::Argument, "eigenvalues must be positive");
    require(k == 0 || eigenvalues_[k] <= eigenvalues_[k - 1], ErrorCategory::Argument,
            "eigenvalues must be nonincreasing");
  }
}

double KLBasis::eigenfunction(std::size_t k, double t) const {
  require(k < size(), ErrorCategory::Range, "mode index exceeds the retained modes");
  if (analytic_) {
    return std::numbers::sqrt2 * std::sin(brownian_frequency(*analytic_, k) * t);
  }
  return interpolate(rule_.nodes(), eigenfunctions_.row(static_cast<Eigen::Index>(k)).data(), t);
}

std::optional<double> KLBasis::eigenfunction_derivative(std::size_t k, double t) const {
  require(k < size(), ErrorCategory::Range, "mode index exceeds the retained modes");
  if (!analytic_) return std::nullopt;
  const double omega = brownian_frequency(*analytic_, k);
  return std::numbers::sqrt2 * omega * std::cos(omega * t);
}

double KLBasis::mode_frequency(std::size_t k) const {
  return analytic_ ? brownian_frequency(*analytic_, k) : 0.0;
}

KLBasis nystrom_decompose(const KernelSpec& spec, const Interval& interval, std::size_t n,
                          QuadratureKind kind, double tol) {
  require(n >= 2, ErrorCategory::Argument, "Nystrom decomposition needs n >= 2");
  return nystrom_decompose(spec, QuadratureRule::make(kind, interval, n), tol);
}

KLBasis nystrom_decompose(const KernelSpec& spec, const QuadratureRule& rule, double tol) {
  require(rule.size() >= 2, ErrorCategory::Argument, "Nystrom decomposition needs n >= 2");
  require(tol > 0.0, ErrorCategory::Argument, "eigenvalue cutoff must be positive");
  const auto n = static_cast<Eigen::Index>(rule.size());
  Vector sqrt_w(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_w(i) = std::sqrt(rule.weights()[static_cast<std::size_t>(i)]);

  const Matrix a = sqrt_w.asDiagonal() * kernel_matrix(spec, rule.nodes()) * sqrt_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) fail(ErrorCategory::Numeric, "eigensolver did not converge");

  const Vector& values = solver.eigenvalues();  // ascending
  const double top = values(n - 1);
  std::vector<Eigen::Index> kept;
  if (top > 0.0) {
    for (Eigen::Index i = n - 1; i >= 0 && values(i) > tol * top; --i) kept.push_back(i);
  }
  if (kept.empty()) fail(ErrorCategory::EmptySpectrum, "no eigenvalue above the cutoff");

  std::vector<double> eigenvalues;
  RowMatrix phi(static_cast<Eigen::Index>(kept.size()), n);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    eigenvalues.push_back(values(kept[k]));
    phi.row(row) = solver.eigenvectors().col(kept[k]).cwiseQuotient(sqrt_w).transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(phi(row, i)) > 1e-12) {
        if (phi(row, i) < 0.0) phi.row(row) *= -1.0;
        break;
      }
    }
  }
  std::string id = spec.name() + "/nystrom/" + to_string(rule.kind()) + "/" + std::to_string(rule.size());
  return KLBasis(rule, std::move(eigenvalues), std::move(phi), std::nullopt, std::move(id));
}

KLBasis closed_form_brownian_basis(std::size_t K, BrownianVariant variant, const QuadratureRule& rule) {
  require(K >= 1, ErrorCategory::Argument, "closed-form basis needs K >= 1");
  require(rule.interval() == Interval(0.0, 1.0), ErrorCategory::Argument,
          "closed-form Brownian basis lives on [0, 1]");
  std::vector<double> eigenvalues(K);
  RowMatrix phi(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(rule.size()));
  for (std::size_t k = 0; k < K; ++k) {
    const double omega = brownian_frequency(variant, k);
    eigenvalues[k] = 1.0 / (omega * omega);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      phi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          std::numbers::sqrt2 * std::sin(omega * rule.nodes()[i]);
    }
  }
  return KLBasis(rule, std::move(eigenvalues), std::move(phi), variant,
                 "brownian/" + to_string(variant) + "/" + std::to_string(rule.size()));
}

double mercer_reconstruct(const KLBasis& basis, double s, double t, std::size_t K) {
  require(K <= basis.size(), ErrorCategory::Range, "K exceeds the retained modes");
  double sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    sum += basis.eigenvalues()[k] * basis.eigenfunction(k, s) * basis.eigenfunction(k, t);
  }
  return sum;
}

double increment_cross_moment(const KLBasis& basis, double s, double t, double u, std::size_t K) {
  require(s < t && t < u, ErrorCategory::Argument, "increment cross moment needs s < t < u");
  require(basis.interval().contains(s) && basis.interval().contains(u), ErrorCategory::Argument,
          "increment points must lie in the basis interval");
  require(K <= basis.size(), ErrorCategory::Range, "K exceeds the retained modes");
  double sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double ps = basis.eigenfunction(k, s);
    const double pt = basis.eigenfunction(k, t);
    const double pu = basis.eigenfunction(k, u);
    sum += basis.eigenvalues()[k] * (pt * pu - ps * pu + ps * pt - pt * pt);
  }
  return sum;
}

std::vector<double> eigen_residuals(const KLBasis& basis, const KernelSpec& spec) {
  const auto& rule = basis.rule();
  const auto n = static_cast<Eigen::Index>(rule.size());
  const Eigen::Map<const Vector> w(rule.weights().data(), n);
  const Matrix m = kernel_matrix(spec, rule.nodes());
  const RowMatrix& phi = basis.eigenfunctions();
  const RowMatrix applied = (phi * w.asDiagonal()) * m;
  std::vector<double> out(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    const Eigen::RowVectorXd r = applied.row(row) - basis.eigenvalues()[k] * phi.row(row);
    out[k] = std::sqrt((r.array().square() * w.transpose().array()).sum());
  }
  return out;
}

Matrix weighted_gram(const QuadratureRule& rule, const RowMatrix& rows) {
  const Eigen::Map<const Vector> w(rule.weights().data(), static_cast<Eigen::Index>(rule.size()));
  return rows * w.asDiagonal() * rows.transpose();
}

double orthonormality_error(const QuadratureRule& rule, const RowMatrix& rows, std::size_t count) {
  const Eigen::Index m = count == 0 ? rows.rows() : std::min<Eigen::Index>(rows.rows(), static_cast<Eigen::Index>(count));
  if (m == 0) return 0.0;
  const Matrix g = weighted_gram(rule, rows.topRows(m));
  return (g - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
}

double discrete_trace(const KernelSpec& spec, const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    sum += rule.weights()[i] * spec(rule.nodes()[i], rule.nodes()[i]);
  }
  return sum;
}

Matrix spectral_projector(const KLBasis& basis, std::size_t first, std::size_t last) {
  require(first <= last && last <= basis.size(), ErrorCategory::Range, "invalid mode range");
  const auto& rule = basis.rule();
  const auto n = static_cast<Eigen::Index>(rule.size());
  Vector sqrt_w(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_w(i) = std::sqrt(rule.weights()[static_cast<std::size_t>(i)]);
  const Matrix v = sqrt_w.asDiagonal() *
                   basis.eigenfunctions()
                       .middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(last - first))
                       .transpose();
  return v * v.transpose();
}

}  // namespace klstoch
