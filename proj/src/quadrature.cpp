#include "klstoch/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "klstoch/errors.hpp"

namespace klstoch {

Interval::Interval(double a, double b) : a_(a), b_(b) {
  require(std::isfinite(a) && std::isfinite(b), ErrorCategory::Argument,
          "interval endpoints must be finite");
  require(a < b, ErrorCategory::Argument, "interval requires a < b");
}

Partition::Partition(std::vector<double> points) : points_(std::move(points)) {
  require(points_.size() >= 2, ErrorCategory::Argument, "partition needs at least two points");
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    require(std::isfinite(points_[i]) && points_[i] < points_[i + 1], ErrorCategory::Argument,
            "partition points must be finite and strictly increasing");
  }
}

Partition Partition::uniform(const Interval& interval, std::size_t cells) {
  require(cells >= 1, ErrorCategory::Argument, "partition needs at least one cell");
  std::vector<double> points(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    points[i] = interval.a() + interval.length() * static_cast<double>(i) / static_cast<double>(cells);
  }
  points.back() = interval.b();
  return Partition(std::move(points));
}

double Partition::mesh() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) m = std::max(m, delta(i));
  return m;
}

std::string to_string(QuadratureKind kind) {
  switch (kind) {
    case QuadratureKind::Trapezoid: return "trapezoid";
    case QuadratureKind::GaussLegendre: return "gauss-legendre";
    case QuadratureKind::Midpoint: return "midpoint";
  }
  return "unknown";
}

QuadratureKind quadrature_kind_from_string(std::string_view name) {
  if (name == "trapezoid") return QuadratureKind::Trapezoid;
  if (name == "gauss-legendre") return QuadratureKind::GaussLegendre;
  if (name == "midpoint") return QuadratureKind::Midpoint;
  fail(ErrorCategory::Config, "unknown quadrature kind '" + std::string(name) + "'");
}

GaussLegendreTable gauss_legendre(std::size_t n) {
  require(n >= 1, ErrorCategory::Argument, "Gauss-Legendre rule needs n >= 1");
  GaussLegendreTable table;
  table.nodes.resize(n);
  table.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess for the i-th largest root.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      derivative = dn * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    // Recompute P'_n at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double dk = static_cast<double>(k);
      const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
      p0 = p1;
      p1 = p2;
    }
    derivative = n == 1 ? 1.0 : dn * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    table.nodes[n - 1 - i] = x;
    table.nodes[i] = -x;
    table.weights[n - 1 - i] = w;
    table.weights[i] = w;
  }
  if (n % 2 == 1) table.nodes[n / 2] = 0.0;
  return table;
}

const GaussLegendreTable& gauss_legendre_panel() {
  static const GaussLegendreTable table = gauss_legendre(8);
  return table;
}

QuadratureRule::QuadratureRule(QuadratureKind kind, Interval interval, std::vector<double> nodes,
                               std::vector<double> weights)
    : kind_(kind), interval_(interval), nodes_(std::move(nodes)), weights_(std::move(weights)) {
  require(!nodes_.empty() && nodes_.size() == weights_.size(), ErrorCategory::Argument,
          "quadrature rule needs one weight per node");
  double total = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    require(weights_[i] > 0.0, ErrorCategory::Argument, "quadrature weights must be positive");
    require(interval_.contains(nodes_[i], 1e-12 * interval_.length()), ErrorCategory::Argument,
            "quadrature node outside the interval");
    if (i > 0) {
      require(nodes_[i] > nodes_[i - 1], ErrorCategory::Argument,
              "quadrature nodes must be strictly increasing");
    }
    total += weights_[i];
  }
  require(std::abs(total - interval_.length()) <= 1e-12 * interval_.length(), ErrorCategory::Argument,
          "quadrature weights must sum to the interval length");
}

QuadratureRule QuadratureRule::make(QuadratureKind kind, const Interval& interval, std::size_t n) {
  const double a = interval.a();
  const double len = interval.length();
  std::vector<double> nodes(n);
  std::vector<double> weights(n);
  switch (kind) {
    case QuadratureKind::Trapezoid: {
      require(n >= 2, ErrorCategory::Argument, "trapezoid rule needs n >= 2");
      const double h = len / static_cast<double>(n - 1);
      for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = a + len * static_cast<double>(i) / static_cast<double>(n - 1);
        weights[i] = h;
      }
      nodes.back() = interval.b();
      weights.front() *= 0.5;
      weights.back() *= 0.5;
      break;
    }
    case QuadratureKind::Midpoint: {
      require(n >= 1, ErrorCategory::Argument, "midpoint rule needs n >= 1");
      const double h = len / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = a + len * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        weights[i] = h;
      }
      break;
    }
    case QuadratureKind::GaussLegendre: {
      const auto table = gauss_legendre(n);
      for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = a + 0.5 * len * (table.nodes[i] + 1.0);
        weights[i] = 0.5 * len * table.weights[i];
      }
      break;
    }
  }
  return QuadratureRule(kind, interval, std::move(nodes), std::move(weights));
}

}  // namespace klstoch
