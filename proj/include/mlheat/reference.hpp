#pragma once

// Straightforward serial implementations kept as oracles for the parallel and
// FFT-based kernels. They are O(n^2) or worse; use small grids.

#include <functional>
#include <span>
#include <vector>

#include "mlheat/grid.hpp"

namespace mlheat::reference {

/// Plain left-to-right sum.
double sum(std::span<const double> v);

/// Applies a radial Fourier multiplier with an explicit O(n^2) DFT (1D only).
Field dft_apply(const Field& f, const std::function<double(double)>& factor);

/// Periodic convolution by direct summation; kernel origin at node n/2.
Field direct_convolution(const Field& kernel, const Field& f);

/// Exact flow of u' = -h u^p written as (u^(1-p) + (p-1) H)^(-1/(p-1)).
std::vector<double> absorb(std::span<const double> in, double H, double p);

}  // namespace mlheat::reference
