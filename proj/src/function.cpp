#include "klstoch/function.hpp"

#include <algorithm>
#include <cmath>

#include "klstoch/errors.hpp"

namespace klstoch {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Segment index for x in a piecewise-linear function; -1 left of the first
// knot, knots.size() - 1 right of the last.
std::ptrdiff_t segment(const PiecewiseLinear& p, double x) {
  const auto& k = p.knots;
  if (x < k.front().first) return -1;
  if (x >= k.back().first) return static_cast<std::ptrdiff_t>(k.size()) - 1;
  const auto it = std::upper_bound(k.begin(), k.end(), x,
                                   [](double v, const auto& knot) { return v < knot.first; });
  return std::distance(k.begin(), it) - 1;
}

}  // namespace

FunctionSpec::FunctionSpec(Variant v) : variant_(std::move(v)) {
  if (const auto* p = std::get_if<PiecewiseLinear>(&variant_)) {
    require(p->knots.size() >= 2, ErrorCategory::Argument, "piecewise-linear function needs two knots");
    for (std::size_t i = 0; i + 1 < p->knots.size(); ++i) {
      require(p->knots[i].first < p->knots[i + 1].first, ErrorCategory::Argument,
              "piecewise-linear knots must be strictly increasing");
    }
  }
}

FunctionSpec FunctionSpec::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  return FunctionSpec(PiecewiseLinear{std::move(knots)});
}

double FunctionSpec::value(double x) const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.c; },
                        [x](const Polynomial& p) {
                          double acc = 0.0;
                          for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) {
                            acc = acc * x + *it;
                          }
                          return acc;
                        },
                        [x](const Sine& s) { return s.amplitude * std::sin(s.angular_frequency * x + s.phase); },
                        [x](const PiecewiseLinear& p) {
                          const auto i = segment(p, x);
                          if (i < 0) return p.knots.front().second;
                          const auto& k = p.knots;
                          if (static_cast<std::size_t>(i) + 1 >= k.size()) return k.back().second;
                          const auto& [x0, y0] = k[static_cast<std::size_t>(i)];
                          const auto& [x1, y1] = k[static_cast<std::size_t>(i) + 1];
                          return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
                        },
                    },
                    variant_);
}

double FunctionSpec::derivative(double x) const {
  return std::visit(overloaded{
                        [](const Constant&) { return 0.0; },
                        [x](const Polynomial& p) {
                          double acc = 0.0;
                          for (std::size_t i = p.coefficients.size(); i-- > 1;) {
                            acc = acc * x + static_cast<double>(i) * p.coefficients[i];
                          }
                          return acc;
                        },
                        [x](const Sine& s) {
                          return s.amplitude * s.angular_frequency * std::cos(s.angular_frequency * x + s.phase);
                        },
                        [x](const PiecewiseLinear& p) {
                          const auto i = segment(p, x);
                          const auto& k = p.knots;
                          if (i < 0 || static_cast<std::size_t>(i) + 1 >= k.size()) return 0.0;
                          const auto& [x0, y0] = k[static_cast<std::size_t>(i)];
                          const auto& [x1, y1] = k[static_cast<std::size_t>(i) + 1];
                          return (y1 - y0) / (x1 - x0);
                        },
                    },
                    variant_);
}

std::vector<double> FunctionSpec::breakpoints() const {
  std::vector<double> out;
  if (const auto* p = std::get_if<PiecewiseLinear>(&variant_)) {
    for (const auto& knot : p->knots) out.push_back(knot.first);
  }
  return out;
}

bool FunctionSpec::is_zero() const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.c == 0.0; },
                        [](const Polynomial& p) {
                          return std::all_of(p.coefficients.begin(), p.coefficients.end(),
                                             [](double c) { return c == 0.0; });
                        },
                        [](const Sine& s) { return s.amplitude == 0.0; },
                        [](const PiecewiseLinear& p) {
                          return std::all_of(p.knots.begin(), p.knots.end(),
                                             [](const auto& k) { return k.second == 0.0; });
                        },
                    },
                    variant_);
}

double integrate_squared(const FunctionSpec& f, double lo, double hi) {
  return integrate_adaptive([&](double x) { const double v = f(x); return v * v; }, lo, hi,
                            f.breakpoints());
}

double integrate_squared_derivative(const FunctionSpec& f, double lo, double hi) {
  return integrate_adaptive([&](double x) { const double v = f.derivative(x); return v * v; }, lo, hi,
                            f.breakpoints());
}

}  // namespace klstoch
