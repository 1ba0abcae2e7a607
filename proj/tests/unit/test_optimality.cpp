#include <doctest.h>

#include <cmath>
#include <numbers>

#include "klstoch/optimality.hpp"
#include "klstoch/reference.hpp"
#include "support.hpp"

using namespace klstoch;
using klstoch::testing::thrown_category;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureRule native(OnbFamily family, std::size_t n) { return QuadratureRule::make(native_rule(family), Interval(0.0, 1.0), n); }

}  // namespace

TEST_CASE("closed-form families are orthonormal on their native rules") {
  const auto trap = native(OnbFamily::FourierCosine, 129);
  CHECK(orthonormality_error(trap, make_onb(OnbFamily::FourierCosine, trap, 64).samples()) < 1e-12);
  const auto gl = native(OnbFamily::LegendreShifted, 80);
  CHECK(orthonormality_error(gl, make_onb(OnbFamily::LegendreShifted, gl, 64).samples()) < 1e-11);
  const auto mid = native(OnbFamily::Haar, 128);
  CHECK(orthonormality_error(mid, make_onb(OnbFamily::Haar, mid, 128).samples()) < 1e-12);

  const auto shifted = QuadratureRule::make(QuadratureKind::Midpoint, Interval(2.0, 5.0), 64);
  CHECK(orthonormality_error(shifted, make_onb(OnbFamily::Haar, shifted, 64).samples()) < 1e-12);
}

TEST_CASE("invalid family/rule combinations") {
  const auto trap = QuadratureRule::make(QuadratureKind::Trapezoid, Interval(0.0, 1.0), 64);
  const auto legendre = make_onb(OnbFamily::LegendreShifted, trap, 64);
  CHECK(thrown_category([&] { diagonal_compressions(legendre, KernelSpec::brownian()); }) ==
        ErrorCategory::InvalidBasis);
  CHECK(thrown_category([&] { make_onb(OnbFamily::Haar, trap, 8); }) == ErrorCategory::InvalidBasis);
  const auto mid = QuadratureRule::make(QuadratureKind::Midpoint, Interval(0.0, 1.0), 48);
  CHECK(thrown_category([&] { make_onb(OnbFamily::Haar, mid, 8); }) == ErrorCategory::InvalidBasis);
  CHECK(thrown_category([&] { make_onb(OnbFamily::FourierCosine, trap, 65); }) == ErrorCategory::Argument);
  CHECK(thrown_category([&] { make_onb(OnbFamily::KL, trap, 4); }) == ErrorCategory::Argument);
  CHECK(onb_family_from_string("haar") == OnbFamily::Haar);
  CHECK(thrown_category([] { onb_family_from_string("wavelet"); }) == ErrorCategory::Config);
}

TEST_CASE("Brownian compressions against closed forms") {
  // <psi, T psi> = int_0^1 (int_t^1 psi)^2 dt for the min kernel.
  const auto trap = native(OnbFamily::FourierCosine, 1025);
  const auto d_cos = diagonal_compressions(make_onb(OnbFamily::FourierCosine, trap, 6), KernelSpec::brownian());
  CHECK(d_cos[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
  for (std::size_t k = 1; k < 6; ++k) {
    const double w = static_cast<double>(k) * kPi;
    CHECK(d_cos[k] == doctest::Approx(1.0 / (w * w)).epsilon(1e-5));
  }
  const auto mid = native(OnbFamily::Haar, 512);
  const auto d_haar = diagonal_compressions(make_onb(OnbFamily::Haar, mid, 2), KernelSpec::brownian());
  CHECK(d_haar[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
  CHECK(d_haar[1] == doctest::Approx(1.0 / 12.0).epsilon(1e-5));
}

TEST_CASE("Haar compressions converge under grid doubling") {
  const auto spec = KernelSpec::fractional_brownian(0.7);
  const auto coarse = diagonal_compressions(make_onb(OnbFamily::Haar, native(OnbFamily::Haar, 128), 16), spec);
  const auto fine = diagonal_compressions(make_onb(OnbFamily::Haar, native(OnbFamily::Haar, 256), 16), spec);
  for (std::size_t k = 0; k < 16; ++k) CHECK(std::abs(coarse[k] - fine[k]) < 1e-4 * coarse[0]);
}

TEST_CASE("parallel compressions equal the serial double sum") {
  const auto rule = native(OnbFamily::LegendreShifted, 40);
  const auto onb = make_onb(OnbFamily::LegendreShifted, rule, 16);
  const auto spec = KernelSpec::ornstein_uhlenbeck(1.0, 1.0);
  const auto fast = diagonal_compressions(onb, spec);
  const auto slow = reference::diagonal_compressions(onb, spec);
  for (std::size_t k = 0; k < 16; ++k) CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-12));
  CHECK(std::is_sorted(fast.rbegin(), fast.rend()));
}

TEST_CASE("trace dominance and the KL equality case") {
  for (const auto& spec : {KernelSpec::brownian(), KernelSpec::fractional_brownian(0.7),
                           KernelSpec::ornstein_uhlenbeck(1.0, 1.0)}) {
    for (auto family : {OnbFamily::FourierCosine, OnbFamily::LegendreShifted, OnbFamily::Haar}) {
      const auto rule = native(family, 64);
      const auto basis = nystrom_decompose(spec, rule);
      const auto rows = check_trace_dominance(make_onb(family, rule, 32), basis, spec, 32);
      REQUIRE(rows.size() == 32);
      for (const auto& r : rows) CHECK(r.pass);
      const auto kl = check_trace_dominance(kl_onb(basis, 32), basis, spec, 32);
      for (const auto& r : kl) CHECK(std::abs(r.margin) <= 1e-10);
    }
  }
  const std::vector<double> d{0.3, 0.2};
  const std::vector<double> l{0.4, 0.1};
  CHECK(thrown_category([&] { check_trace_dominance(d, l, 3); }) == ErrorCategory::Argument);
  const auto rows = check_trace_dominance(d, l, 2);
  CHECK(rows[0].margin == doctest::Approx(0.1));
  CHECK(rows[1].margin == doctest::Approx(0.0));
}

TEST_CASE("entropy numbers") {
  const std::vector<double> v{0.5, 0.25, 0.25};
  const double h = -(0.5 * std::log(0.5) + 0.5 * std::log(0.25));
  CHECK(entropy_numbers(v, 3).value == doctest::Approx(h));
  CHECK(entropy_numbers(v, 3).normalizer == doctest::Approx(1.0));
  CHECK(entropy_numbers(v, 1, 2.0).value == doctest::Approx(-0.25 * std::log(0.25)));
  CHECK(beta_partial_sum(v, 3, 1.0) == doctest::Approx(-h));

  const std::vector<double> tiny{1.0, 1e-16, 0.0};
  CHECK(entropy_numbers(tiny, 3).value == 0.0);
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(thrown_category([&] { entropy_numbers(zeros, 2); }) == ErrorCategory::UndefinedEntropy);
  CHECK(thrown_category([&] { entropy_numbers(v, 4); }) == ErrorCategory::Argument);
}

TEST_CASE("recursive Rayleigh argument limits") {
  const auto rule = native(OnbFamily::FourierCosine, 20);
  CHECK(thrown_category([&] { recursive_rayleigh(KernelSpec::brownian(), rule, 17); }) == ErrorCategory::Argument);
  CHECK(thrown_category([&] { recursive_rayleigh(KernelSpec::brownian(), rule, 0); }) == ErrorCategory::Argument);
}

TEST_CASE("KL compressions reproduce the spectrum") {
  const auto rule = native(OnbFamily::FourierCosine, 200);
  const auto spec = KernelSpec::fractional_brownian(0.7);
  const auto basis = nystrom_decompose(spec, rule);
  const auto d = diagonal_compressions(kl_onb(basis, 40), spec);
  for (std::size_t k = 0; k < 40; ++k) CHECK(std::abs(d[k] - basis.eigenvalues()[k]) <= 1e-8);
}

TEST_CASE("a complete discrete basis exhausts the trace") {
  const auto mid = native(OnbFamily::Haar, 64);
  for (const auto& spec : {KernelSpec::brownian(), KernelSpec::ornstein_uhlenbeck(1.0, 1.0)}) {
    const auto d = diagonal_compressions(make_onb(OnbFamily::Haar, mid, 64), spec);
    double sum = 0.0;
    for (double v : d) sum += v;
    CHECK(std::abs(sum - discrete_trace(spec, mid)) <= 1e-10);
    const auto basis = nystrom_decompose(spec, mid);
    const auto rows = check_trace_dominance(d, basis.eigenvalues(), 64);
    CHECK(std::abs(rows.back().margin) <= 1e-10);
  }
}

TEST_CASE("Haar compressions on a 512-node grid against a 1024-node recomputation") {
  const auto spec = KernelSpec::brownian();
  const auto coarse = diagonal_compressions(make_onb(OnbFamily::Haar, native(OnbFamily::Haar, 512), 32), spec);
  const auto fine = diagonal_compressions(make_onb(OnbFamily::Haar, native(OnbFamily::Haar, 1024), 32), spec);
  for (std::size_t k = 0; k < 32; ++k) CHECK(std::abs(coarse[k] - fine[k]) <= 1e-4);
}

TEST_CASE("cosine basis never beats the Brownian KL partial sums") {
  const auto rule = native(OnbFamily::FourierCosine, 257);
  const auto basis = nystrom_decompose(KernelSpec::brownian(), rule);
  for (const auto& r : check_trace_dominance(make_onb(OnbFamily::FourierCosine, rule, 32), basis, KernelSpec::brownian(), 32)) {
    CHECK(r.margin >= 0.0);
  }
}

TEST_CASE("entropy of degenerate and uniform sequences") {
  const std::vector<double> one{1.0};
  CHECK(entropy_numbers(one, 1).value == 0.0);
  for (std::size_t m : {2u, 5u, 64u}) {
    const std::vector<double> uniform(m, 0.3);
    CHECK(entropy_numbers(uniform, m).value == doctest::Approx(std::log(static_cast<double>(m))));
  }
}
