#include "klstoch/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "klstoch/errors.hpp"
#include "klstoch/parallel.hpp"

namespace klstoch {

std::string to_string(OnbFamily family) {
  switch (family) {
    case OnbFamily::KL: return "kl";
    case OnbFamily::FourierCosine: return "cosine";
    case OnbFamily::LegendreShifted: return "legendre";
    case OnbFamily::Haar: return "haar";
  }
  return "unknown";
}

OnbFamily onb_family_from_string(const std::string& name) {
  if (name == "kl") return OnbFamily::KL;
  if (name == "cosine") return OnbFamily::FourierCosine;
  if (name == "legendre") return OnbFamily::LegendreShifted;
  if (name == "haar") return OnbFamily::Haar;
  fail(ErrorCategory::Config, "unknown orthonormal basis family '" + name + "'");
}

QuadratureKind native_rule(OnbFamily family) {
  switch (family) {
    case OnbFamily::LegendreShifted: return QuadratureKind::GaussLegendre;
    case OnbFamily::Haar: return QuadratureKind::Midpoint;
    case OnbFamily::KL:
    case OnbFamily::FourierCosine: return QuadratureKind::Trapezoid;
  }
  return QuadratureKind::Trapezoid;
}

ONBSpec::ONBSpec(OnbFamily family, QuadratureRule rule, RowMatrix samples)
    : family_(family), rule_(std::move(rule)), samples_(std::move(samples)) {
  require(static_cast<std::size_t>(samples_.cols()) == rule_.size(), ErrorCategory::Argument,
          "basis samples must match the quadrature nodes");
}

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

RowMatrix sample(std::size_t count, const QuadratureRule& rule, const std::function<double(std::size_t, double)>& psi) {
  RowMatrix out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(rule.size()));
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t i = 0; i < rule.size(); ++i) {
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = psi(k, rule.nodes()[i]);
    }
  }
  return out;
}

}  // namespace

ONBSpec make_onb(OnbFamily family, const QuadratureRule& rule, std::size_t count) {
  require(count >= 1 && count <= rule.size(), ErrorCategory::Argument,
          "basis size must lie between 1 and the number of nodes");
  const double a = rule.interval().a();
  const double len = rule.interval().length();
  switch (family) {
    case OnbFamily::KL:
      fail(ErrorCategory::Argument, "the KL basis is built from spectral data (kl_onb)");
    case OnbFamily::FourierCosine:
      return ONBSpec(family, rule, sample(count, rule, [&](std::size_t k, double t) {
                       if (k == 0) return 1.0 / std::sqrt(len);
                       return std::sqrt(2.0 / len) * std::cos(static_cast<double>(k) * std::numbers::pi * (t - a) / len);
                     }));
    case OnbFamily::LegendreShifted:
      return ONBSpec(family, rule, sample(count, rule, [&](std::size_t k, double t) {
                       const double x = 2.0 * (t - a) / len - 1.0;
                       double p0 = 1.0;
                       double p1 = x;
                       if (k == 0) p1 = p0;
                       for (std::size_t j = 2; j <= k; ++j) {
                         const double dj = static_cast<double>(j);
                         const double p2 = ((2.0 * dj - 1.0) * x * p1 - (dj - 1.0) * p0) / dj;
                         p0 = p1;
                         p1 = p2;
                       }
                       return std::sqrt((2.0 * static_cast<double>(k) + 1.0) / len) * p1;
                     }));
    case OnbFamily::Haar: {
      require(rule.kind() == QuadratureKind::Midpoint && is_power_of_two(rule.size()), ErrorCategory::InvalidBasis,
              "Haar basis needs a midpoint rule on a power-of-two grid");
      return ONBSpec(family, rule, sample(count, rule, [&](std::size_t k, double t) {
                       if (k == 0) return 1.0 / std::sqrt(len);
                       // k = 2^level + shift
                       std::size_t level = 0;
                       while ((std::size_t{2} << level) <= k) ++level;
                       const std::size_t shift = k - (std::size_t{1} << level);
                       const double scale = std::ldexp(1.0, static_cast<int>(level));
                       const double u = (t - a) / len * scale - static_cast<double>(shift);
                       const double height = std::sqrt(scale / len);
                       if (u < 0.0 || u >= 1.0) return 0.0;
                       return u < 0.5 ? height : -height;
                     }));
    }
  }
  fail(ErrorCategory::Argument, "unknown basis family");
}

ONBSpec kl_onb(const KLBasis& basis, std::size_t count) {
  const std::size_t m = count == 0 ? basis.size() : std::min(count, basis.size());
  return ONBSpec(OnbFamily::KL, basis.rule(), basis.eigenfunctions().topRows(static_cast<Eigen::Index>(m)));
}

std::vector<double> diagonal_compressions(const ONBSpec& onb, const KernelSpec& spec) {
  const auto& rule = onb.rule();
  if (orthonormality_error(rule, onb.samples()) > 1e-6) {
    fail(ErrorCategory::InvalidBasis, onb.name() + " samples are not orthonormal under the quadrature weights");
  }
  const Matrix m = kernel_matrix(spec, rule.nodes());
  const Eigen::Map<const Vector> w(rule.weights().data(), static_cast<Eigen::Index>(rule.size()));
  const RowMatrix weighted = onb.samples() * w.asDiagonal();
  std::vector<double> d(onb.size());
  const auto count = static_cast<std::ptrdiff_t>(onb.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const Vector u = weighted.row(k).transpose();
    const Vector mu = m * u;
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) s += u(i) * mu(i);
    d[static_cast<std::size_t>(k)] = s;
  }
  std::sort(d.begin(), d.end(), std::greater<>());
  return d;
}

std::vector<DominanceRow> check_trace_dominance(std::span<const double> compressions,
                                                std::span<const double> eigenvalues, std::size_t n_max) {
  require(n_max <= compressions.size(), ErrorCategory::Argument, "n_max exceeds the computed compressions");
  std::vector<DominanceRow> rows;
  double sum_lambda = 0.0;
  double sum_d = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    // Modes below the cutoff contribute zero.
    if (n - 1 < eigenvalues.size()) sum_lambda += eigenvalues[n - 1];
    sum_d += compressions[n - 1];
    const double margin = sum_lambda - sum_d;
    rows.push_back({n, sum_lambda, sum_d, margin, margin >= -1e-10});
  }
  return rows;
}

std::vector<DominanceRow> check_trace_dominance(const ONBSpec& onb, const KLBasis& basis, const KernelSpec& spec,
                                                std::size_t n_max) {
  const auto d = diagonal_compressions(onb, spec);
  return check_trace_dominance(d, basis.eigenvalues(), n_max);
}

namespace {

double normalized(double v, double normalizer) {
  const double x = v / normalizer;
  return x < 1e-14 ? 0.0 : x;
}

double resolve_normalizer(std::span<const double> values, std::optional<double> normalizer) {
  double z = 0.0;
  if (normalizer) {
    z = *normalizer;
  } else {
    for (double v : values) z += v;
  }
  if (!(z > 0.0)) fail(ErrorCategory::UndefinedEntropy, "entropy of an all-zero sequence is undefined");
  return z;
}

}  // namespace

EntropyValue entropy_numbers(std::span<const double> values, std::size_t n, std::optional<double> normalizer) {
  require(n <= values.size(), ErrorCategory::Argument, "n exceeds the number of values");
  for (double v : values) require(v >= 0.0 || v > -1e-14, ErrorCategory::Argument, "entropy needs nonnegative values");
  const double z = resolve_normalizer(values, normalizer);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = normalized(values[k], z);
    if (x > 0.0) s -= x * std::log(x);
  }
  return {s, z};
}

double beta_partial_sum(std::span<const double> values, std::size_t n, double normalizer) {
  require(n <= values.size(), ErrorCategory::Argument, "n exceeds the number of values");
  require(normalizer > 0.0, ErrorCategory::UndefinedEntropy, "normalizer must be positive");
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = normalized(values[k], normalizer);
    if (x > 0.0) s += x * std::log(x);
  }
  return s;
}

std::vector<double> recursive_rayleigh(const KernelSpec& spec, const QuadratureRule& rule, std::size_t K) {
  require(K >= 1 && K <= 16, ErrorCategory::Argument, "recursive Rayleigh check supports 1 <= K <= 16");
  const auto n = static_cast<Eigen::Index>(rule.size());
  require(static_cast<Eigen::Index>(K) <= n, ErrorCategory::Argument, "K exceeds the grid size");
  Vector sqrt_w(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_w(i) = std::sqrt(rule.weights()[static_cast<std::size_t>(i)]);
  const Matrix a = sqrt_w.asDiagonal() * kernel_matrix(spec, rule.nodes()) * sqrt_w.asDiagonal();

  std::vector<Vector> found;
  std::vector<double> values;
  std::mt19937_64 engine(20260101);
  std::uniform_real_distribution<double> uniform(0.5, 1.5);

  const auto deflate = [&](Vector& x) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : found) x -= q.dot(x) * q;
    }
  };

  for (std::size_t k = 0; k < K; ++k) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = uniform(engine);
    deflate(x);
    x.normalize();
    double lambda = x.dot(a * x);
    bool converged = false;
    for (int step = 0; step < 10000; ++step) {
      Vector y = a * x;
      deflate(y);
      const double next = x.dot(y);
      const double norm = y.norm();
      if (norm == 0.0) {
        lambda = 0.0;
        converged = true;
        break;
      }
      x = y / norm;
      const double scale = values.empty() ? std::abs(next) : values.front();
      if (step > 2 && std::abs(next - lambda) <= 1e-15 * scale) {
        lambda = next;
        converged = true;
        break;
      }
      lambda = next;
    }
    if (!converged) fail(ErrorCategory::Numeric, "power iteration did not converge in 10^4 steps");
    deflate(x);
    x.normalize();
    found.push_back(x);
    values.push_back(x.dot(a * x));
  }
  return values;
}

}  // namespace klstoch
