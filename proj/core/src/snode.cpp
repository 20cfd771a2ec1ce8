#include "skewdirac/snode.hpp"

#include "skewdirac/errors.hpp"
#include "skewdirac/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>

namespace skewdirac {
namespace {

// 5-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 5> kGaussX = {0.5 - 0.5 * 0.9061798459386640, 0.5 - 0.5 * 0.5384693101056831,
                                           0.5, 0.5 + 0.5 * 0.5384693101056831,
                                           0.5 + 0.5 * 0.9061798459386640};
constexpr std::array<double, 5> kGaussW = {0.5 * 0.2369268850561891, 0.5 * 0.4786286704993665,
                                           0.5 * 0.5688888888888889, 0.5 * 0.4786286704993665,
                                           0.5 * 0.2369268850561891};

CMatrix pi_rows(const Phi1Profile& profile, int last) {
  const int m1 = profile.m1();
  const int m2 = profile.m2();
  CMatrix pi(static_cast<Eigen::Index>(last + 1) * m2, m1 + m2);
  for (int a = 0; a <= last; ++a) {
    pi.block(a * m2, 0, m2, m1) = profile.values[static_cast<std::size_t>(a)];
    pi.block(a * m2, m1, m2, m2).setIdentity();
  }
  return pi;
}

RVector trapezoid_weights(int last, int m2, double h) {
  RVector w = RVector::Constant(static_cast<Eigen::Index>(last + 1) * m2, h);
  w.head(m2).setConstant(0.5 * h);
  w.tail(m2).setConstant(0.5 * h);
  return w;
}

void check_profile(const Phi1Profile& p) {
  if (p.values.size() < 3 || p.values.size() != p.derivative.size() || !(p.h > 0.0)) {
    throw ValidationError("snode", "profile needs >= 3 nodes, matching derivative samples and h > 0");
  }
}

}  // namespace

Phi1Profile make_profile(MatrixSeries values, double h) {
  if (values.size() < 3) throw ValidationError("snode", "profile needs at least 3 nodes");
  if (!(h > 0.0)) throw ValidationError("snode", "profile step must be positive");
  const std::size_t n = values.size() - 1;
  values[0].setZero();
  MatrixSeries d(values.size());
  d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
  d[n] = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * h);
  for (std::size_t k = 1; k < n; ++k) d[k] = (values[k + 1] - values[k - 1]) / (2.0 * h);
  return {h, std::move(values), std::move(d)};
}

Phi1Profile make_profile(const std::function<CMatrix(double)>& phi1,
                         const std::function<CMatrix(double)>& dphi1, double l, int n) {
  if (n < 2 || !(l > 0.0)) throw ValidationError("snode", "profile needs n >= 2 and l > 0");
  Phi1Profile p;
  p.h = l / n;
  for (int k = 0; k <= n; ++k) {
    p.values.push_back(phi1(k * p.h));
    p.derivative.push_back(dphi1(k * p.h));
  }
  p.values[0].setZero();
  return p;
}

SKernel::SKernel(CMatrix c, CMatrix chol, int m2, double h)
    : c_(std::move(c)), chol_(std::move(chol)), m2_(m2), h_(h) {}

CMatrix SKernel::kernel(int a, int b) const {
  CMatrix out = block(a, b);
  if (a == b) out -= CMatrix::Identity(m2_, m2_);
  return out / h_;
}

CMatrix SKernel::solve(int k, const CMatrix& rhs) const {
  if (k < 0 || k > cells()) throw ValidationError("snode", "solve index out of range");
  if (rhs.rows() != static_cast<Eigen::Index>(k + 1) * m2_) {
    throw ValidationError("snode", "right-hand side has wrong row count");
  }
  if (k == 0) return rhs;  // zero-length interval: S_0 = I
  const Eigen::Index lead = static_cast<Eigen::Index>(k) * m2_;
  const double r2 = std::sqrt(0.5);
  const auto l11 = chol_.topLeftCorner(lead, lead).triangularView<Eigen::Lower>();
  const CMatrix r = r2 * chol_.block(lead, 0, m2_, lead);
  const CMatrix lkk = chol_.block(lead, lead, m2_, m2_);
  const CMatrix dd = 0.5 * (lkk * lkk.adjoint()) + 0.5 * CMatrix::Identity(m2_, m2_);
  const Eigen::LLT<CMatrix> d(dd);

  const CMatrix z1 = l11.solve(rhs.topRows(lead));
  const CMatrix z2 = d.matrixL().solve(r2 * rhs.bottomRows(m2_) - r * z1);
  const CMatrix y2 = d.matrixU().solve(z2);
  CMatrix out(rhs.rows(), rhs.cols());
  out.topRows(lead) = l11.adjoint().solve(z1 - r.adjoint() * y2);
  out.bottomRows(m2_) = y2 / r2;
  return out;
}

double SKernel::min_eigenvalue() const {
  const RVector w = trapezoid_weights(cells(), m2_, h_).cwiseSqrt();
  // I + W^{1/2} s W^{1/2} with s = (C - I)/h.
  const Eigen::Index nn = c_.rows();
  CMatrix sym = (c_ - CMatrix::Identity(nn, nn)) / h_;
  sym = w.cast<cplx>().asDiagonal() * sym * w.cast<cplx>().asDiagonal();
  sym += CMatrix::Identity(nn, nn);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(sym), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

SKernel s_kernel(const Phi1Profile& profile) {
  check_profile(profile);
  const int n = profile.cells();
  const int m2 = profile.m2();
  const double h = profile.h;
  const auto& d = profile.derivative;
  const Eigen::Index nn = static_cast<Eigen::Index>(n + 1) * m2;
  CMatrix c = CMatrix::Zero(nn, nn);
  // Each diagonal a - b = off is an independent recursion.
  parallel_for(static_cast<std::size_t>(n + 1), [&](std::size_t off_u) {
    const int off = static_cast<int>(off_u);
    CMatrix s = CMatrix::Zero(m2, m2);
    for (int b = 0; b + off < n; ++b) {
      const int a = b + off;
      s += (0.5 * h) * (d[static_cast<std::size_t>(a + 1)] * d[static_cast<std::size_t>(b + 1)].adjoint() +
                        d[static_cast<std::size_t>(a)] * d[static_cast<std::size_t>(b)].adjoint());
      c.block(static_cast<Eigen::Index>(a + 1) * m2, static_cast<Eigen::Index>(b + 1) * m2, m2, m2) = h * s;
      if (off != 0) {
        c.block(static_cast<Eigen::Index>(b + 1) * m2, static_cast<Eigen::Index>(a + 1) * m2, m2, m2) =
            h * s.adjoint();
      }
    }
  });
  c = hermitian_part(c);
  c += CMatrix::Identity(nn, nn);
  Eigen::LLT<CMatrix> llt(c);
  if (llt.info() != Eigen::Success) {
    throw IllPosedError("snode", "Cholesky factorization of the S kernel failed (corrupted profile or grid too coarse)");
  }
  CMatrix chol = llt.matrixL();
  if (!all_finite(chol)) throw IllPosedError("snode", "S kernel factor is not finite");
  return SKernel(std::move(c), std::move(chol), m2, h);
}

CMatrix resolvent_A(const CMatrix& f, int m2, double h, cplx z) {
  if (m2 < 1 || f.rows() % m2 != 0) throw ValidationError("snode", "grid function has wrong row count");
  const int nodes = static_cast<int>(f.rows() / m2);
  const cplx q = kI * z * h;
  const cplx decay = std::exp(-q);
  const cplx wk = h * expint1(q);
  const cplx wk1 = h * (expint0(q) - expint1(q));
  CMatrix out = f;
  CMatrix j = CMatrix::Zero(m2, f.cols());
  for (int k = 0; k + 1 < nodes; ++k) {
    j = decay * j + wk * f.middleRows(k * m2, m2) + wk1 * f.middleRows((k + 1) * m2, m2);
    out.middleRows((k + 1) * m2, m2) -= kI * z * j;
  }
  return out;
}

namespace {

// int_0^{x_r} Q(x)* [Pi(x) - iz J(x)] dx with Q, Pi linear on each cell and
// J(x) = int_0^x e^{i(t-x)z} Pi(t) dt integrated exactly for that interpolant.
CMatrix pair_resolvent(const CMatrix& q, const CMatrix& pi, int m2, double h, cplx z) {
  const int cells = static_cast<int>(pi.rows() / m2) - 1;
  const Eigen::Index m = pi.cols();
  const cplx qh = kI * z * h;
  CMatrix out = CMatrix::Zero(m, m);
  CMatrix j = CMatrix::Zero(m2, m);
  for (int k = 0; k < cells; ++k) {
    const auto q0 = q.middleRows(k * m2, m2);
    const auto q1 = q.middleRows((k + 1) * m2, m2);
    const auto p0 = pi.middleRows(k * m2, m2);
    const auto p1 = pi.middleRows((k + 1) * m2, m2);
    for (std::size_t g = 0; g < kGaussX.size(); ++g) {
      const double s = kGaussX[g];
      const cplx p = qh * s;
      const cplx big0 = s * expint0(p);
      const cplx big1 = s * s * expint1(p);
      const CMatrix jx = std::exp(-p) * j + h * (((1.0 - s) * big0 + big1) * p0 + (s * big0 - big1) * p1);
      const CMatrix qx = (1.0 - s) * q0 + s * q1;
      const CMatrix px = (1.0 - s) * p0 + s * p1;
      out += (h * kGaussW[g]) * (qx.adjoint() * (px - kI * z * jx));
    }
    j = std::exp(-qh) * j + h * (expint1(qh) * p0 + (expint0(qh) - expint1(qh)) * p1);
  }
  return out;
}

}  // namespace

CMatrix transfer_matrix(const Phi1Profile& profile, const SKernel& s, int r, cplx z) {
  check_profile(profile);
  if (r < 0 || r > profile.cells() || r > s.cells()) throw ValidationError("snode", "r index out of range");
  const int m = profile.m1() + profile.m2();
  if (r == 0) return CMatrix::Identity(m, m);
  const CMatrix pi = pi_rows(profile, r);
  const CMatrix q = s.solve(r, pi);
  return CMatrix::Identity(m, m) - kI * z * pair_resolvent(q, pi, profile.m2(), profile.h, z);
}

CMatrix pi_s_pi(const Phi1Profile& profile, const SKernel& s, int r) {
  check_profile(profile);
  const int m = profile.m1() + profile.m2();
  if (r == 0) return CMatrix::Zero(m, m);
  const CMatrix pi = pi_rows(profile, r);
  return pair_resolvent(s.solve(r, pi), pi, profile.m2(), profile.h, 0.0);
}

SNodeMatrices snode_matrices(const Phi1Profile& profile, const SKernel& s) {
  check_profile(profile);
  const int n = profile.cells();
  const int m2 = profile.m2();
  const double h = profile.h;
  const Eigen::Index nn = static_cast<Eigen::Index>(n + 1) * m2;
  SNodeMatrices out;
  out.weight = trapezoid_weights(n, m2, h);
  out.a = CMatrix::Zero(nn, nn);
  for (int a = 1; a <= n; ++a) {
    for (int b = 0; b <= a; ++b) {
      const double w = (b == 0 || b == a) ? 0.5 * h : h;
      out.a.block(static_cast<Eigen::Index>(a) * m2, static_cast<Eigen::Index>(b) * m2, m2, m2)
          .diagonal()
          .setConstant(-kI * w);
    }
  }
  CMatrix kern = (s.matrix() - CMatrix::Identity(nn, nn)) / h;
  out.s = CMatrix::Identity(nn, nn) + kern * out.weight.cast<cplx>().asDiagonal();
  out.pi = pi_rows(profile, n);
  return out;
}

double snode_identity_residual(const Phi1Profile& profile, const SKernel& s) {
  const SNodeMatrices m = snode_matrices(profile, s);
  const auto w = m.weight.cast<cplx>().asDiagonal();
  const RVector wsq = m.weight.cwiseSqrt();
  const CMatrix a_star = m.weight.cwiseInverse().cast<cplx>().asDiagonal() * m.a.adjoint() * w;
  const CMatrix r = m.a * m.s - m.s * a_star + kI * (m.pi * m.pi.adjoint()) * w;
  const CMatrix scaled =
      wsq.cast<cplx>().asDiagonal() * r * wsq.cwiseInverse().cast<cplx>().asDiagonal();
  return op_norm(scaled);
}

}  // namespace skewdirac
