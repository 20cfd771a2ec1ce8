#include "skewdirac/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace skewdirac {
namespace {

double norm1(const CMatrix& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Pade numerator/denominator pieces: exp(A) ~ (V - U)^{-1} (V + U).
template <std::size_t N>
void pade_odd_even(const CMatrix& a, const std::array<double, N>& b, CMatrix& u, CMatrix& v) {
  const Eigen::Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  CMatrix odd = b[1] * id;
  CMatrix even = b[0] * id;
  CMatrix power = id;
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * a2;
    even += b[k] * power;
    if (k + 1 < N) odd += b[k + 1] * power;
  }
  u = a * odd;
  v = even;
}

void pade13(const CMatrix& a, CMatrix& u, CMatrix& v) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix tmp_u = b[13] * a6 + b[11] * a4 + b[9] * a2;
  u = a * (a6 * tmp_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const CMatrix tmp_v = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * tmp_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace

CMatrix expm(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  const double nrm = norm1(a);
  CMatrix u, v;
  int squarings = 0;
  if (nrm <= 1.495585217958292e-2) {
    pade_odd_even(a, std::array<double, 4>{120.0, 60.0, 12.0, 1.0}, u, v);
  } else if (nrm <= 2.539398330063230e-1) {
    pade_odd_even(a, std::array<double, 6>{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0}, u, v);
  } else if (nrm <= 9.504178996162932e-1) {
    pade_odd_even(a,
                  std::array<double, 8>{17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0,
                                        1512.0, 56.0, 1.0},
                  u, v);
  } else if (nrm <= 2.097847961257068) {
    pade_odd_even(a,
                  std::array<double, 10>{17643225600.0, 8821612800.0, 2075673600.0,
                                         302702400.0, 30270240.0, 2162160.0, 110880.0,
                                         3960.0, 90.0, 1.0},
                  u, v);
  } else {
    constexpr double theta13 = 5.371920351148152;
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / theta13))));
    pade13(a / std::ldexp(1.0, squarings), u, v);
  }
  CMatrix result = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

double op_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  if (a.rows() > 16 && a.cols() > 16) {
    Eigen::BDCSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
  }
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

double min_eigenvalue(const CMatrix& a) {
  if (a.rows() == 1) return a(0, 0).real();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const CMatrix& a) {
  if (a.rows() == 1) return a(0, 0).real();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

CMatrix hermitian_sqrt(const CMatrix& a, double clamp) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  const RVector ev = es.eigenvalues().cwiseMax(clamp).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix hermitian_inv_sqrt(const CMatrix& a, double clamp) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  const RVector ev = es.eigenvalues().cwiseMax(clamp).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix polar_unitary(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double condition_number(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

cplx expint0(cplx p) {
  if (std::abs(p) < 0.5) {
    cplx term = 1.0, sum = 0.0;
    for (int n = 0; n < 25; ++n) {
      sum += term / static_cast<double>(n + 1);
      term *= -p / static_cast<double>(n + 1);
    }
    return sum;
  }
  return (1.0 - std::exp(-p)) / p;
}

cplx expint1(cplx p) {
  if (std::abs(p) < 0.5) {
    cplx term = 1.0, sum = 0.0;
    for (int n = 0; n < 25; ++n) {
      sum += term / static_cast<double>(n + 2);
      term *= -p / static_cast<double>(n + 1);
    }
    return sum;
  }
  return (1.0 - std::exp(-p) * (1.0 + p)) / (p * p);
}

bool all_finite(const CMatrix& a, double limit) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double m = std::abs(a.data()[k]);
    if (!std::isfinite(m) || m > limit) return false;
  }
  return true;
}

}  // namespace skewdirac
