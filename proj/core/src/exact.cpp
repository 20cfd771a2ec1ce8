#include "skewdirac/exact.hpp"

#include <cmath>

namespace skewdirac {

cplx scalar_constant_weyl(double c, cplx z) {
  if (c == 0.0) return 0.0;
  cplx root = std::sqrt(z * z + c * c);
  if (root.imag() < 0.0) root = -root;
  return kI * (root - z) / c;
}

namespace {

// sum_k t_k with t_0 = first and t_{k+1} = t_k * ratio(k); stops once terms are negligible.
template <class Ratio>
double series(double first, Ratio ratio) {
  double term = first;
  double sum = 0.0;
  for (int k = 0; k < 500; ++k) {
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    term *= ratio(k);
  }
  return sum;
}

}  // namespace

double scalar_constant_phi1(double c, double x) {
  if (x == 0.0 || c == 0.0) return 0.0;
  const double q = c * c * x * x;
  // a_k = c^{2k+1} x^{2k+1} / (k!(k+1)!(2k+1))
  return -series(c * x, [&](int k) {
    return q * (2.0 * k + 1.0) / ((k + 1.0) * (k + 2.0) * (2.0 * k + 3.0));
  });
}

double scalar_constant_phi1_derivative(double c, double x) {
  if (c == 0.0) return 0.0;
  const double q = c * c * x * x;
  // b_k = c^{2k+1} x^{2k} / (k!(k+1)!)
  return -series(c, [&](int k) { return q / ((k + 1.0) * (k + 2.0)); });
}

Phi1Profile scalar_constant_profile(double c, double l, int n) {
  return make_profile([c](double x) { return CMatrix::Constant(1, 1, scalar_constant_phi1(c, x)).eval(); },
                      [c](double x) { return CMatrix::Constant(1, 1, scalar_constant_phi1_derivative(c, x)).eval(); },
                      l, n);
}

}  // namespace skewdirac
