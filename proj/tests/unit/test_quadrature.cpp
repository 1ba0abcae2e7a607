#include <doctest.h>

#include <cmath>
#include <numbers>

#include "klstoch/quadrature.hpp"
#include "support.hpp"

using namespace klstoch;
using klstoch::testing::thrown_category;

namespace {

double apply(const QuadratureRule& rule, auto f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights()[i] * f(rule.nodes()[i]);
  return s;
}

}  // namespace

TEST_CASE("interval and partition validation") {
  CHECK(thrown_category([] { Interval(1.0, 1.0); }) == ErrorCategory::Argument);
  CHECK(thrown_category([] { Interval(0.0, INFINITY); }) == ErrorCategory::Argument);
  CHECK(thrown_category([] { Partition({0.0, 0.5, 0.5}); }) == ErrorCategory::Argument);
  CHECK(thrown_category([] { Partition({0.0}); }) == ErrorCategory::Argument);

  const auto p = Partition::uniform(Interval(0.0, 2.0), 4);
  REQUIRE(p.size() == 5);
  CHECK(p.points()[2] == doctest::Approx(1.0));
  CHECK(p.back() == 2.0);
  CHECK(p.mesh() == doctest::Approx(0.5));
}

TEST_CASE("trapezoid weights and its h^2/6 error on x^2") {
  for (std::size_t n : {2u, 3u, 17u, 100u}) {
    const auto rule = QuadratureRule::make(QuadratureKind::Trapezoid, Interval(0.0, 1.0), n);
    const double h = 1.0 / static_cast<double>(n - 1);
    CHECK(rule.nodes().front() == 0.0);
    CHECK(rule.nodes().back() == 1.0);
    CHECK(rule.weights().front() == doctest::Approx(h / 2));
    CHECK(apply(rule, [](double x) { return 3.0 * x - 1.0; }) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(apply(rule, [](double x) { return x * x; }) - 1.0 / 3.0 == doctest::Approx(h * h / 6.0).epsilon(1e-9));
  }
}

TEST_CASE("midpoint rule is exact for linear functions and cell-centred") {
  const auto rule = QuadratureRule::make(QuadratureKind::Midpoint, Interval(-1.0, 3.0), 8);
  CHECK(rule.nodes().front() == doctest::Approx(-0.75));
  CHECK(rule.weights()[3] == doctest::Approx(0.5));
  CHECK(apply(rule, [](double x) { return 2.0 * x + 1.0; }) == doctest::Approx(12.0));
  // Error on x^2 is -(b-a) h^2 f'' / 24 with f'' = 2.
  CHECK(apply(rule, [](double x) { return x * x; }) - 28.0 / 3.0 == doctest::Approx(-4.0 * 0.25 / 12.0));
}

TEST_CASE("Gauss-Legendre matches the 3-point table and is exact to degree 2n-1") {
  const auto g3 = gauss_legendre(3);
  CHECK(g3.nodes[0] == doctest::Approx(-std::sqrt(0.6)));
  CHECK(g3.nodes[1] == doctest::Approx(0.0));
  CHECK(g3.weights[0] == doctest::Approx(5.0 / 9.0));
  CHECK(g3.weights[1] == doctest::Approx(8.0 / 9.0));

  for (std::size_t n : {1u, 4u, 9u, 40u}) {
    const auto rule = QuadratureRule::make(QuadratureKind::GaussLegendre, Interval(0.0, 2.0), n);
    for (std::size_t d = 0; d < 2 * n; ++d) {
      const double exact = std::pow(2.0, static_cast<double>(d + 1)) / static_cast<double>(d + 1);
      const double got = apply(rule, [d](double x) { return std::pow(x, static_cast<double>(d)); });
      CHECK(got == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("composite Gauss panels converge on an oscillatory integrand") {
  const double got = composite_gauss([](double x) { return std::sin(10.0 * x); }, 0.0, std::numbers::pi, 16);
  CHECK(got == doctest::Approx(0.0).epsilon(1e-12));
  const double area = composite_gauss([](double x) { return std::exp(x); }, 0.0, 1.0, 2);
  CHECK(area == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-14));
}

TEST_CASE("rule names and validation") {
  for (auto kind : {QuadratureKind::Trapezoid, QuadratureKind::GaussLegendre, QuadratureKind::Midpoint}) {
    CHECK(quadrature_kind_from_string(to_string(kind)) == kind);
  }
  CHECK(thrown_category([] { quadrature_kind_from_string("simpson"); }) == ErrorCategory::Config);
  CHECK(thrown_category([] {
          QuadratureRule(QuadratureKind::Trapezoid, Interval(0.0, 1.0), {0.0, 1.0}, {0.7, 0.2});
        }) == ErrorCategory::Argument);
  CHECK(thrown_category([] {
          QuadratureRule(QuadratureKind::Trapezoid, Interval(0.0, 1.0), {0.0, 1.0}, {1.5, -0.5});
        }) == ErrorCategory::Argument);
  CHECK(thrown_category([] {
          QuadratureRule(QuadratureKind::Trapezoid, Interval(0.0, 1.0), {0.5, 1.5}, {0.5, 0.5});
        }) == ErrorCategory::Argument);
  CHECK(thrown_category([] { QuadratureRule::make(QuadratureKind::Trapezoid, Interval(0.0, 1.0), 1); }) ==
        ErrorCategory::Argument);
}
