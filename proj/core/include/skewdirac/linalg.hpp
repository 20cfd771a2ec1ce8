#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace skewdirac {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// A function sampled on grid nodes, one matrix per node.
using MatrixSeries = std::vector<CMatrix>;

inline constexpr cplx kI{0.0, 1.0};

/// Matrix exponential by scaling and squaring with a diagonal Pade core
/// (degrees 3/5/7/9/13 chosen from the 1-norm).
CMatrix expm(const CMatrix& a);

/// Spectral norm (largest singular value).
double op_norm(const CMatrix& a);

/// Hermitian part (a + a*)/2.
CMatrix hermitian_part(const CMatrix& a);

/// Smallest / largest eigenvalue of the Hermitian part of `a`.
double min_eigenvalue(const CMatrix& a);
double max_eigenvalue(const CMatrix& a);

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues below `clamp` are raised to `clamp`.
CMatrix hermitian_sqrt(const CMatrix& a, double clamp = 1e-14);

/// Inverse principal square root, same clamping rule.
CMatrix hermitian_inv_sqrt(const CMatrix& a, double clamp = 1e-14);

/// Unitary factor U of the polar decomposition a = U P (square a).
CMatrix polar_unitary(const CMatrix& a);

/// 2-norm condition number.
double condition_number(const CMatrix& a);

/// int_0^1 e^{-p s} ds and int_0^1 s e^{-p s} ds, by series near p = 0.
cplx expint0(cplx p);
cplx expint1(cplx p);

/// true when every entry is finite and below `limit` in modulus.
bool all_finite(const CMatrix& a, double limit = 1e300);

}  // namespace skewdirac
