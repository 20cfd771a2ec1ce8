#pragma once

#include "skewdirac/linalg.hpp"

#include <functional>

namespace skewdirac {

/// m2 x m1 profile Phi1 on the nodes of [0, l] together with its derivative.
struct Phi1Profile {
  double h = 0.0;
  MatrixSeries values;      // Phi1(x_k), values[0] == 0
  MatrixSeries derivative;  // Phi1'(x_k)

  int cells() const { return static_cast<int>(values.size()) - 1; }
  int m1() const { return static_cast<int>(values.front().cols()); }
  int m2() const { return static_cast<int>(values.front().rows()); }
  double length() const { return h * cells(); }
};

/// Snaps values[0] to zero and differentiates: central differences inside,
/// second-order one-sided stencils at both ends.
Phi1Profile make_profile(MatrixSeries values, double h);
Phi1Profile make_profile(const std::function<CMatrix(double)>& phi1,
                         const std::function<CMatrix(double)>& dphi1, double l, int n);

/// Nystrom realization of S = I + int_0^l s(x,t) . dt.
///
/// `c` holds I + h s(x_a, x_b) in (n+1) x (n+1) blocks of size m2 and `chol` its
/// lower Cholesky factor. S_{x_k} on [0, x_k] carries trapezoid weight h/2 at
/// node k; solve() folds that into the leading block of `chol` with a
/// last-block-row correction, so one factorization serves every k.
class SKernel {
 public:
  SKernel(CMatrix c, CMatrix chol, int m2, double h);

  int m2() const { return m2_; }
  int cells() const { return static_cast<int>(c_.rows() / m2_) - 1; }
  double step() const { return h_; }
  const CMatrix& matrix() const { return c_; }
  const CMatrix& cholesky() const { return chol_; }
  CMatrix block(int a, int b) const { return c_.block(a * m2_, b * m2_, m2_, m2_); }

  /// s(x_a, x_b).
  CMatrix kernel(int a, int b) const;

  /// Solves S_{x_k} f = rhs for f sampled on nodes 0..k; rhs has (k+1) m2 rows.
  CMatrix solve(int k, const CMatrix& rhs) const;

  /// Smallest eigenvalue of the symmetrized trapezoid operator W^{1/2} S W^{-1/2}
  /// on the whole interval.
  double min_eigenvalue() const;

 private:
  CMatrix c_;
  CMatrix chol_;
  int m2_;
  double h_;
};

/// Builds s by the diagonal recursion s(a+1,b+1) = s(a,b) + (h/2)[...] and factors
/// I + h s. Throws IllPosedError when the factorization breaks down.
SKernel s_kernel(const Phi1Profile& profile);

/// (I - zA)^{-1} f = f - iz int_0^x e^{i(t-x)z} f(t) dt on the grid, A = -i int_0^x.
/// Per-cell recursion exact for piecewise-linear f. f has one m2-row block per node
/// and any number of columns.
CMatrix resolvent_A(const CMatrix& f, int m2, double h, cplx z);

/// w_A(x_r, z) = I - iz Pi* S_r^{-1} (I - zA_r)^{-1} P_r Pi with Pi = [Phi1 I].
CMatrix transfer_matrix(const Phi1Profile& profile, const SKernel& s, int r, cplx z);

/// Pi* S_r^{-1} P_r Pi, whose r-derivative drives w_A.
CMatrix pi_s_pi(const Phi1Profile& profile, const SKernel& s, int r);

/// The node matrices of the operator identity on the trapezoid grid, for testing.
struct SNodeMatrices {
  CMatrix a;       // -i times cumulative trapezoid
  CMatrix s;       // I + s W
  CMatrix pi;      // rows [Phi1(x_a) I]
  RVector weight;  // trapezoid weights, one per scalar row
};

SNodeMatrices snode_matrices(const Phi1Profile& profile, const SKernel& s);

/// ||W^{1/2}(AS - SA* + i Pi Pi* W)W^{-1/2}||, with A* = W^{-1} A^H W.
double snode_identity_residual(const Phi1Profile& profile, const SKernel& s);

}  // namespace skewdirac
