#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "klstoch/interval.hpp"

namespace klstoch {

// Midpoint is the uniform cell-centred rule; it is the rule on which sampled
// Haar functions are exactly orthonormal.
enum class QuadratureKind { Trapezoid, GaussLegendre, Midpoint };

std::string to_string(QuadratureKind kind);
QuadratureKind quadrature_kind_from_string(std::string_view name);

/// Nodes and positive weights discretizing an integral over an interval.
class QuadratureRule {
 public:
  static QuadratureRule make(QuadratureKind kind, const Interval& interval, std::size_t n);

  /// Arbitrary rule; validates positivity, ordering and the weight total.
  QuadratureRule(QuadratureKind kind, Interval interval, std::vector<double> nodes,
                 std::vector<double> weights);

  QuadratureKind kind() const noexcept { return kind_; }
  const Interval& interval() const noexcept { return interval_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  QuadratureKind kind_;
  Interval interval_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct GaussLegendreTable {
  std::vector<double> nodes;    // ascending, in [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
GaussLegendreTable gauss_legendre(std::size_t n);

/// Reference 8-point panel used by the composite integrators.
const GaussLegendreTable& gauss_legendre_panel();

/// Composite 8-point Gauss-Legendre sum of h over [lo, hi] with `panels`
/// equal panels.
template <class F>
double composite_gauss(const F& h, double lo, double hi, std::size_t panels) {
  const auto& table = gauss_legendre_panel();
  const double width = (hi - lo) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * width;
    double panel = 0.0;
    for (std::size_t q = 0; q < table.nodes.size(); ++q) {
      panel += table.weights[q] * h(mid + 0.5 * width * table.nodes[q]);
    }
    total += 0.5 * width * panel;
  }
  return total;
}

}  // namespace klstoch
