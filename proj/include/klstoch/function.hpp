#pragma once

#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace klstoch {

struct Constant {
  double c;
};

/// sum_i coefficients[i] * x^i
struct Polynomial {
  std::vector<double> coefficients;
};

/// amplitude * sin(angular_frequency * x + phase)
struct Sine {
  double amplitude;
  double angular_frequency;
  double phase;
};

/// Linear interpolation between (x, y) knots with ascending x; constant
/// extension outside the knot range.
struct PiecewiseLinear {
  std::vector<std::pair<double, double>> knots;
};

/// Deterministic integrand f(t).
class FunctionSpec {
 public:
  using Variant = std::variant<Constant, Polynomial, Sine, PiecewiseLinear>;

  FunctionSpec(Variant v);  // NOLINT: implicit by design of the variant wrapper

  static FunctionSpec constant(double c) { return FunctionSpec(Constant{c}); }
  static FunctionSpec polynomial(std::vector<double> coefficients) {
    return FunctionSpec(Polynomial{std::move(coefficients)});
  }
  static FunctionSpec sine(double amplitude, double angular_frequency, double phase = 0.0) {
    return FunctionSpec(Sine{amplitude, angular_frequency, phase});
  }
  static FunctionSpec piecewise_linear(std::vector<std::pair<double, double>> knots);

  const Variant& variant() const noexcept { return variant_; }

  double operator()(double x) const { return value(x); }
  double value(double x) const;
  /// f'(x); right derivative at the knots of a piecewise-linear function.
  double derivative(double x) const;
  /// Points where f' jumps (empty for smooth variants).
  std::vector<double> breakpoints() const;
  bool is_zero() const;

 private:
  Variant variant_;
};

/// Complex integrand handled as its real and imaginary parts.
struct ComplexFunction {
  FunctionSpec real;
  FunctionSpec imag;

  std::complex<double> operator()(double x) const { return {real(x), imag(x)}; }
};

/// Integral of h over [lo, hi] by composite Gauss-Legendre, splitting at the
/// given breakpoints and doubling panels until successive values agree to
/// rel_tol (relative to the integral of |h|).
template <class H>
double integrate_adaptive(const H& h, double lo, double hi, const std::vector<double>& breakpoints,
                          std::size_t initial_panels = 4, double rel_tol = 1e-12, int max_levels = 20);

/// integral of |f|^2 over [lo, hi].
double integrate_squared(const FunctionSpec& f, double lo, double hi);
/// integral of |f'|^2 over [lo, hi].
double integrate_squared_derivative(const FunctionSpec& f, double lo, double hi);

}  // namespace klstoch

#include "klstoch/detail/integrate_adaptive.hpp"
