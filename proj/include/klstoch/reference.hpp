#pragma once

// Serial reference implementations of the data-parallel kernels. They follow
// the defining formulas literally and are kept for testing and benchmarking
// against the OpenMP versions.

#include <cstddef>
#include <span>

#include "klstoch/function.hpp"
#include "klstoch/kernel.hpp"
#include "klstoch/optimality.hpp"
#include "klstoch/spectral.hpp"
#include "klstoch/types.hpp"

namespace klstoch::reference {

Matrix kernel_matrix(const KernelSpec& spec, std::span<const double> grid);

std::vector<double> diagonal_compressions(const ONBSpec& onb, const KernelSpec& spec);

RowMatrix synthesize(const KLBasis& basis, const RowMatrix& coefficients);

double variance_spectral(const FunctionSpec& f, const KLBasis& basis, double t0, double t,
                         std::size_t K);

}  // namespace klstoch::reference
