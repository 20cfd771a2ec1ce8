#pragma once

#include "skewdirac/potential.hpp"

#include <cstdint>
#include <random>

namespace skewdirac {

/// Smooth random potential: a short cosine/sine series with complex Gaussian
/// coefficients decaying like 1/(1+k^2), rescaled so that sup ||v|| = fill * M.
/// Deterministic for a given engine state.
std::function<CMatrix(double)> random_smooth_potential(std::mt19937_64& rng, int m1, int m2, double l,
                                                       double norm_bound, double fill = 0.9, int modes = 4);

/// Cell-wise constant random potential with independent cells, ||v|| <= norm_bound.
PotentialGrid random_cellwise_potential(std::mt19937_64& rng, int m1, int m2, double l, int n,
                                        double norm_bound);

/// Standard normal sample from a fixed Box-Muller transform, so that sequences do not
/// depend on the standard library's distribution implementation.
double normal_sample(std::mt19937_64& rng);
double uniform_sample(std::mt19937_64& rng);

}  // namespace skewdirac
