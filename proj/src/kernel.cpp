#include "klstoch/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "klstoch/errors.hpp"

namespace klstoch {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Index of the grid cell [grid[i], grid[i+1]] holding t, and the local
// coordinate in [0, 1]. Exact nodes give coordinate 0 (or 1 at the last node).
std::pair<std::size_t, double> locate(const std::vector<double>& grid, double t) {
  if (grid.size() == 1) return {0, 0.0};
  if (t >= grid.back()) return {grid.size() - 2, 1.0};
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const auto i = static_cast<std::size_t>(std::distance(grid.begin(), it)) - 1;
  return {i, (t - grid[i]) / (grid[i + 1] - grid[i])};
}

}  // namespace

Tabulated::Tabulated(std::vector<double> grid, Matrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  require(n >= 1, ErrorCategory::InvalidKernel, "tabulated kernel needs a nonempty grid");
  require(values_.rows() == n && values_.cols() == n, ErrorCategory::InvalidKernel,
          "tabulated kernel matrix must be square and match the grid");
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    require(grid_[i] < grid_[i + 1], ErrorCategory::InvalidKernel,
            "tabulated kernel grid must be strictly increasing");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    require(values_(i, i) >= 0.0, ErrorCategory::InvalidKernel,
            "tabulated kernel has a negative diagonal entry");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      require(std::abs(values_(i, j) - values_(j, i)) <= 1e-12, ErrorCategory::InvalidKernel,
              "tabulated kernel matrix is not symmetric");
    }
  }
}

double Tabulated::operator()(double s, double t) const {
  const double lo = grid_.front();
  const double hi = grid_.back();
  if (!(s >= lo && s <= hi && t >= lo && t <= hi)) {
    fail(ErrorCategory::Domain, "point outside the tabulated kernel grid");
  }
  if (grid_.size() == 1) return values_(0, 0);
  const auto [i, u] = locate(grid_, s);
  const auto [j, v] = locate(grid_, t);
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  return (1.0 - u) * (1.0 - v) * values_(ii, jj) + (1.0 - u) * v * values_(ii, jj + 1) +
         u * (1.0 - v) * values_(ii + 1, jj) + u * v * values_(ii + 1, jj + 1);
}

KernelSpec KernelSpec::brownian() { return KernelSpec(BrownianMotion{}); }

KernelSpec KernelSpec::fractional_brownian(double hurst) {
  require(hurst > 0.0 && hurst < 1.0, ErrorCategory::InvalidKernel, "Hurst index must lie in (0, 1)");
  return KernelSpec(FractionalBrownian{hurst});
}

KernelSpec KernelSpec::ornstein_uhlenbeck(double theta, double sigma) {
  require(theta > 0.0 && sigma > 0.0, ErrorCategory::InvalidKernel,
          "Ornstein-Uhlenbeck kernel needs theta > 0 and sigma > 0");
  return KernelSpec(OrnsteinUhlenbeck{theta, sigma});
}

KernelSpec KernelSpec::tabulated(std::vector<double> grid, Matrix values) {
  return KernelSpec(Tabulated(std::move(grid), std::move(values)));
}

std::string KernelSpec::name() const {
  return std::visit(overloaded{
                        [](const BrownianMotion&) { return std::string("brownian"); },
                        [](const FractionalBrownian& k) {
                          std::ostringstream os;
                          os << "fbm(H=" << k.hurst << ")";
                          return os.str();
                        },
                        [](const OrnsteinUhlenbeck& k) {
                          std::ostringstream os;
                          os << "ou(theta=" << k.theta << ",sigma=" << k.sigma << ")";
                          return os.str();
                        },
                        [](const Tabulated&) { return std::string("tabulated"); },
                    },
                    variant_);
}

bool KernelSpec::in_domain(double t) const {
  if (const auto* tab = std::get_if<Tabulated>(&variant_)) {
    return t >= tab->grid().front() && t <= tab->grid().back();
  }
  return std::isfinite(t) && t >= 0.0;
}

double KernelSpec::operator()(double s, double t) const {
  if (!in_domain(s) || !in_domain(t)) {
    fail(ErrorCategory::Domain, "kernel evaluated outside its domain");
  }
  // Ordered arguments make every formula exactly symmetric.
  const double lo = std::min(s, t);
  const double hi = std::max(s, t);
  return std::visit(overloaded{
                        [&](const BrownianMotion&) { return lo; },
                        [&](const FractionalBrownian& k) {
                          const double e = 2.0 * k.hurst;
                          return 0.5 * (std::pow(lo, e) + std::pow(hi, e) - std::pow(hi - lo, e));
                        },
                        [&](const OrnsteinUhlenbeck& k) {
                          const double scale = k.sigma * k.sigma / (2.0 * k.theta);
                          return scale * (std::exp(-k.theta * (hi - lo)) - std::exp(-k.theta * (lo + hi)));
                        },
                        [&](const Tabulated& k) { return k(lo, hi); },
                    },
                    variant_);
}

double eval_kernel(const KernelSpec& spec, double s, double t) { return spec(s, t); }

Matrix kernel_matrix(const KernelSpec& spec, std::span<const double> grid) {
  require(!grid.empty(), ErrorCategory::Argument, "kernel matrix needs a nonempty grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    require(grid[i] < grid[i + 1], ErrorCategory::Argument, "grid must be strictly increasing");
  }
  for (double t : grid) {
    if (!spec.in_domain(t)) fail(ErrorCategory::Domain, "grid point outside the kernel domain");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Matrix m(n, n);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = spec(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

Matrix increment_covariance(const KernelSpec& spec, const Partition& partition) {
  const Matrix k = kernel_matrix(spec, partition.points());
  const auto n = static_cast<Eigen::Index>(partition.cells());
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = k(i + 1, j + 1) - k(i + 1, j) - k(i, j + 1) + k(i, j);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

PsdReport psd_report(const Matrix& symmetric, double eps) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorCategory::Numeric, "eigensolver did not converge");
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  return {lo, hi, lo >= -eps * std::max(hi, 0.0)};
}

KernelSpec load_tabulated_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::Io, "cannot open kernel table " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(ErrorCategory::Io, "malformed number '" + cell + "' in " + path.string());
      }
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCategory::Io, "empty kernel table " + path.string());
  std::vector<double> grid = rows.front();
  const auto n = static_cast<Eigen::Index>(grid.size());
  require(static_cast<Eigen::Index>(rows.size()) == n + 1, ErrorCategory::InvalidKernel,
          "kernel table needs one matrix row per grid point");
  Matrix values(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i) + 1];
    require(static_cast<Eigen::Index>(row.size()) == n, ErrorCategory::InvalidKernel,
            "kernel table row has the wrong length");
    for (Eigen::Index j = 0; j < n; ++j) values(i, j) = row[static_cast<std::size_t>(j)];
  }
  return KernelSpec::tabulated(std::move(grid), std::move(values));
}

}  // namespace klstoch
