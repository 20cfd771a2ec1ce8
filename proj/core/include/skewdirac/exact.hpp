#pragma once

#include "skewdirac/linalg.hpp"
#include "skewdirac/snode.hpp"

namespace skewdirac {

/// Closed forms for the scalar constant potential v = c (m1 = m2 = 1).

/// Weyl function i(sqrt(z^2 + c^2) - z)/c with the root in the upper half-plane.
cplx scalar_constant_weyl(double c, cplx z);

/// Phi1(x) = -sum_k c^{2k+1} x^{2k+1} / (k! (k+1)! (2k+1)), i.e. -int_0^x I_1(2ct)/t dt.
double scalar_constant_phi1(double c, double x);
/// Phi1'(x) = -I_1(2cx)/x.
double scalar_constant_phi1_derivative(double c, double x);
Phi1Profile scalar_constant_profile(double c, double l, int n);

}  // namespace skewdirac
