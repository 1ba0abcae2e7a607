// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "klstoch/kernel.hpp"
#include "klstoch/montecarlo.hpp"
#include "klstoch/optimality.hpp"
#include "klstoch/quadrature.hpp"
#include "klstoch/reference.hpp"
#include "klstoch/spectral.hpp"

namespace {

using namespace klstoch;

std::vector<double> grid(std::size_t n) {
  return QuadratureRule::make(QuadratureKind::Trapezoid, Interval(0.0, 1.0), n).nodes();
}

void BM_KernelMatrixSerial(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const auto spec = KernelSpec::fractional_brownian(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(reference::kernel_matrix(spec, g));
}

void BM_KernelMatrixParallel(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const auto spec = KernelSpec::fractional_brownian(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(spec, g));
}

void BM_CompressionsSerial(benchmark::State& state) {
  const auto rule = QuadratureRule::make(QuadratureKind::Trapezoid, Interval(0.0, 1.0),
                                         static_cast<std::size_t>(state.range(0)));
  const auto onb = make_onb(OnbFamily::FourierCosine, rule, 32);
  const auto spec = KernelSpec::brownian();
  for (auto _ : state) benchmark::DoNotOptimize(reference::diagonal_compressions(onb, spec));
}

void BM_CompressionsParallel(benchmark::State& state) {
  const auto rule = QuadratureRule::make(QuadratureKind::Trapezoid, Interval(0.0, 1.0),
                                         static_cast<std::size_t>(state.range(0)));
  const auto onb = make_onb(OnbFamily::FourierCosine, rule, 32);
  const auto spec = KernelSpec::brownian();
  for (auto _ : state) benchmark::DoNotOptimize(diagonal_compressions(onb, spec));
}

KLBasis bench_basis() {
  const auto rule = QuadratureRule::make(QuadratureKind::Trapezoid, Interval(0.0, 1.0), 257);
  return closed_form_brownian_basis(128, BrownianVariant::VerifiedKL, rule);
}

void BM_SynthesisSerial(benchmark::State& state) {
  const auto basis = bench_basis();
  const auto z = draw_coefficients({7, 0}, 0, static_cast<std::size_t>(state.range(0)), basis.size());
  for (auto _ : state) benchmark::DoNotOptimize(reference::synthesize(basis, z));
}

void BM_SynthesisParallel(benchmark::State& state) {
  const auto basis = bench_basis();
  const auto M = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_paths(basis, basis.size(), M, {7, 0}));
}

}  // namespace

BENCHMARK(BM_KernelMatrixSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_KernelMatrixParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_CompressionsSerial)->Arg(129)->Arg(257);
BENCHMARK(BM_CompressionsParallel)->Arg(129)->Arg(257);
BENCHMARK(BM_SynthesisSerial)->Arg(1024);
BENCHMARK(BM_SynthesisParallel)->Arg(1024);

BENCHMARK_MAIN();
