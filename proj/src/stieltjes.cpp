#include "klstoch/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "klstoch/errors.hpp"
#include "klstoch/parallel.hpp"

namespace klstoch {

namespace {

std::size_t initial_panels(double frequency, double length) {
  return static_cast<std::size_t>(std::ceil(frequency * length / std::numbers::pi)) + 4;
}

// int f over [max(x_c, t0), min(x_{c+1}, t)] for every cell c of `nodes`.
std::vector<double> cell_integrals(const FunctionSpec& f, const std::vector<double>& nodes, double t0,
                                   double t) {
  const auto breaks = f.breakpoints();
  std::vector<double> out(nodes.size() - 1, 0.0);
  for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
    const double lo = std::max(nodes[c], t0);
    const double hi = std::min(nodes[c + 1], t);
    if (hi > lo) out[c] = integrate_adaptive(f, lo, hi, breaks, 1);
  }
  return out;
}

double sampled_stieltjes(const std::vector<double>& cells, const std::vector<double>& nodes,
                         const double* samples) {
  double sum = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c] == 0.0) continue;
    sum += cells[c] * (samples[c + 1] - samples[c]) / (nodes[c + 1] - nodes[c]);
  }
  return sum;
}

void check_range(const Integrator& g, double t0, double t) {
  require(t0 < t, ErrorCategory::Argument, "Stieltjes integral needs t0 < t");
  if (g.is_sampled()) {
    require(t0 >= g.nodes().front() && t <= g.nodes().back(), ErrorCategory::Argument,
            "integration range exceeds the sampled integrator");
  }
}

}  // namespace

Integrator Integrator::analytic(std::function<double(double)> value, std::function<double(double)> derivative,
                                double frequency) {
  require(static_cast<bool>(value), ErrorCategory::Argument, "integrator needs a value function");
  Integrator g;
  g.value_ = std::move(value);
  g.derivative_ = std::move(derivative);
  g.frequency_ = frequency;
  return g;
}

Integrator Integrator::sampled(std::vector<double> nodes, std::vector<double> values) {
  require(nodes.size() >= 2 && nodes.size() == values.size(), ErrorCategory::Argument,
          "sampled integrator needs matching nodes and values (at least two)");
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    require(nodes[i] < nodes[i + 1], ErrorCategory::Argument, "integrator nodes must increase");
  }
  Integrator g;
  g.nodes_ = std::move(nodes);
  g.samples_ = std::move(values);
  return g;
}

Integrator Integrator::mode(const KLBasis& basis, std::size_t k) {
  require(k < basis.size(), ErrorCategory::Range, "mode index exceeds the retained modes");
  if (basis.analytic_form()) {
    const KLBasis* b = &basis;
    return analytic([b, k](double t) { return b->eigenfunction(k, t); },
                    [b, k](double t) { return *b->eigenfunction_derivative(k, t); }, basis.mode_frequency(k));
  }
  // Node samples, extended linearly to the interval ends when the rule has
  // no endpoint nodes.
  std::vector<double> nodes;
  std::vector<double> values;
  const auto& x = basis.rule().nodes();
  const double a = basis.interval().a();
  const double b = basis.interval().b();
  if (x.front() > a) {
    nodes.push_back(a);
    values.push_back(basis.eigenfunction(k, a));
  }
  const auto row = basis.eigenfunctions().row(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes.push_back(x[i]);
    values.push_back(row(static_cast<Eigen::Index>(i)));
  }
  if (x.back() < b) {
    nodes.push_back(b);
    values.push_back(basis.eigenfunction(k, b));
  }
  return sampled(std::move(nodes), std::move(values));
}

double Integrator::value(double t) const {
  if (!is_sampled()) return value_(t);
  const std::size_t n = nodes_.size();
  std::size_t i = 0;
  if (t >= nodes_.back()) {
    i = n - 2;
  } else if (t > nodes_.front()) {
    i = static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), t) - nodes_.begin()) - 1;
  }
  const double u = (t - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  if (u == 0.0) return samples_[i];
  if (u == 1.0) return samples_[i + 1];
  return samples_[i] + u * (samples_[i + 1] - samples_[i]);
}

double stieltjes_integral(const FunctionSpec& f, const Integrator& g, double t0, double t,
                          const StieltjesOptions& options) {
  check_range(g, t0, t);
  if (g.is_sampled()) {
    return sampled_stieltjes(cell_integrals(f, g.nodes(), t0, t), g.nodes(), g.samples().data());
  }
  if (g.has_derivative()) {
    return integrate_adaptive([&](double s) { return f(s) * g.derivative(s); }, t0, t, f.breakpoints(),
                              initial_panels(g.frequency(), t - t0), options.rel_tol, options.max_levels);
  }
  return stieltjes_refinement(f, g, t0, t, options);
}

double stieltjes_refinement(const FunctionSpec& f, const Integrator& g, double t0, double t,
                            const StieltjesOptions& options) {
  check_range(g, t0, t);
  constexpr int max_order = 8;
  constexpr int min_levels = 3;
  std::vector<double> previous_row;
  double previous_best = 0.0;
  for (int level = 0; level <= options.max_levels; ++level) {
    const std::size_t cells = std::size_t{1} << level;
    const double h = (t - t0) / static_cast<double>(cells);
    double sum = 0.0;
    double variation = 0.0;
    double g_left = g.value(t0);
    for (std::size_t i = 0; i < cells; ++i) {
      const double left = t0 + h * static_cast<double>(i);
      const double right = i + 1 == cells ? t : t0 + h * static_cast<double>(i + 1);
      const double g_right = g.value(right);
      const double fv = f(left);
      sum += fv * (g_right - g_left);
      variation += std::abs(fv * (g_right - g_left));
      g_left = g_right;
    }
    // Left sums expand in every power of the mesh; column m removes h^m.
    std::vector<double> row{sum};
    for (int m = 1; m <= std::min(level, max_order); ++m) {
      const double factor = std::ldexp(1.0, m) - 1.0;
      row.push_back(row[m - 1] + (row[m - 1] - previous_row[m - 1]) / factor);
    }
    const double best = row.back();
    if (level >= min_levels &&
        std::abs(best - previous_best) <= options.rel_tol * std::max(std::abs(best), variation)) {
      return best;
    }
    if (level == options.max_levels) {
      throw ConvergenceError("Stieltjes refinement did not converge", best, previous_best);
    }
    previous_best = best;
    previous_row = std::move(row);
  }
  return previous_best;
}

double stieltjes_by_parts(const FunctionSpec& f, const Integrator& g, double t0, double t) {
  check_range(g, t0, t);
  const double boundary = f(t) * g.value(t) - f(t0) * g.value(t0);
  std::vector<double> breaks = f.breakpoints();
  if (g.is_sampled()) breaks.insert(breaks.end(), g.nodes().begin(), g.nodes().end());
  const double interior = integrate_adaptive([&](double s) { return g.value(s) * f.derivative(s); }, t0, t,
                                             breaks, initial_panels(g.frequency(), t - t0));
  return boundary - interior;
}

double riemann_stieltjes_sum(const FunctionSpec& f, std::span<const double> path, const Partition& partition) {
  require(path.size() == partition.size(), ErrorCategory::Argument,
          "path must be sampled at every partition point");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    sum += f(partition.points()[i]) * (path[i + 1] - path[i]);
  }
  return sum;
}

std::vector<double> spectral_terms(const FunctionSpec& f, const KLBasis& basis, double t0, double t,
                                   std::size_t K) {
  require(K <= basis.size(), ErrorCategory::Range, "K exceeds the retained modes");
  require(t0 < t, ErrorCategory::Argument, "spectral variance needs t0 < t");
  require(basis.interval().contains(t0) && basis.interval().contains(t), ErrorCategory::Argument,
          "integration range must lie in the basis interval");
  std::vector<double> terms(K, 0.0);
  if (K == 0) return terms;
  const auto n = static_cast<std::ptrdiff_t>(K);
  if (basis.analytic_form()) {
    ExceptionSlot errors;
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      errors.run([&] {
        const auto kk = static_cast<std::size_t>(k);
        const double v = stieltjes_integral(f, Integrator::mode(basis, kk), t0, t);
        terms[kk] = basis.eigenvalues()[kk] * v * v;
      });
    }
    errors.rethrow();
    return terms;
  }
  const Integrator first = Integrator::mode(basis, 0);
  const std::vector<double> cells = cell_integrals(f, first.nodes(), t0, t);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const Integrator g = Integrator::mode(basis, kk);
    const double v = sampled_stieltjes(cells, g.nodes(), g.samples().data());
    terms[kk] = basis.eigenvalues()[kk] * v * v;
  }
  return terms;
}

double variance_spectral(const FunctionSpec& f, const KLBasis& basis, double t0, double t, std::size_t K) {
  const auto terms = spectral_terms(f, basis, t0, t, K);
  return pairwise_sum(terms);
}

double variance_spectral(const ComplexFunction& f, const KLBasis& basis, double t0, double t, std::size_t K) {
  return variance_spectral(f.real, basis, t0, t, K) + variance_spectral(f.imag, basis, t0, t, K);
}

namespace {

Vector left_values(const FunctionSpec& f, const Partition& partition) {
  Vector v(static_cast<Eigen::Index>(partition.cells()));
  for (std::size_t i = 0; i < partition.cells(); ++i) v(static_cast<Eigen::Index>(i)) = f(partition.points()[i]);
  return v;
}

double quadratic_form(const Matrix& c, const Vector& v) {
  const Vector cv = c * v;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += v(i) * cv(i);
  return sum;
}

}  // namespace

double variance_discrete(const FunctionSpec& f, const Partition& partition, const KernelSpec& spec) {
  return quadratic_form(increment_covariance(spec, partition), left_values(f, partition));
}

double variance_discrete(const ComplexFunction& f, const Partition& partition, const KernelSpec& spec) {
  const Matrix c = increment_covariance(spec, partition);
  return quadratic_form(c, left_values(f.real, partition)) + quadratic_form(c, left_values(f.imag, partition));
}

double variance_discrete_eigen(const FunctionSpec& f, const Partition& partition, const KernelSpec& spec) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(increment_covariance(spec, partition));
  if (solver.info() != Eigen::Success) fail(ErrorCategory::Numeric, "eigensolver did not converge");
  const Vector coords = solver.eigenvectors().transpose() * left_values(f, partition);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < coords.size(); ++k) sum += solver.eigenvalues()(k) * coords(k) * coords(k);
  return sum;
}

AprioriBound apriori_bound(const FunctionSpec& f, const KLBasis& basis, double t0, double t, std::size_t K) {
  if (std::abs(f(t0)) > 1e-12 || std::abs(f(t)) > 1e-12) {
    fail(ErrorCategory::Precondition,
         "a priori bound is implemented only for integrands vanishing at both ends");
  }
  AprioriBound out{};
  out.lhs = variance_spectral(f, basis, t0, t, K);
  out.bound = basis.eigenvalues().front() * integrate_squared_derivative(f, t0, t);
  return out;
}

}  // namespace klstoch
