#include "skewdirac/weyl.hpp"

#include "skewdirac/errors.hpp"
#include "skewdirac/propagator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace skewdirac {
namespace {

std::string z_str(cplx z) {
  std::ostringstream s;
  s << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return s.str();
}

struct Blocks {
  CMatrix a11, a12, a21, a22;
};

Blocks split(const Signature& sig, const CMatrix& g) {
  return {g.topLeftCorner(sig.m1, sig.m1), g.topRightCorner(sig.m1, sig.m2),
          g.bottomLeftCorner(sig.m2, sig.m1), g.bottomRightCorner(sig.m2, sig.m2)};
}

MatrixBall left_part(const Signature& sig, const CMatrix& gram, CMatrix& neg22) {
  const Blocks b = split(sig, gram);
  neg22 = hermitian_part(-b.a22);
  if (!(min_eigenvalue(neg22) > 0.0)) {
    throw DomainError("weyl-direct", "-A22 is not positive definite (z outside the Weyl half-plane?)");
  }
  MatrixBall ball;
  ball.center = neg22.llt().solve(b.a21);
  ball.rho_l = hermitian_inv_sqrt(neg22);
  return ball;
}

}  // namespace

double MatrixBall::radius() const { return op_norm(rho_l) * op_norm(rho_r); }

MatrixBall matrix_ball(const Signature& sig, const CMatrix& gram) {
  CMatrix neg22;
  MatrixBall ball = left_part(sig, gram, neg22);
  const Blocks b = split(sig, gram);
  ball.rho_r = hermitian_sqrt(b.a11 + b.a12 * ball.center);
  return ball;
}

MatrixBall matrix_ball(const Signature& sig, const CMatrix& gram, const CMatrix& gram_inv) {
  CMatrix neg22;
  MatrixBall ball = left_part(sig, gram, neg22);
  const CMatrix inv11 = hermitian_part(gram_inv.topLeftCorner(sig.m1, sig.m1));
  if (!(min_eigenvalue(inv11) > 0.0)) {
    throw DomainError("weyl-direct", "(A^{-1})_11 is not positive definite");
  }
  ball.rho_r = hermitian_inv_sqrt(inv11);
  return ball;
}

CMatrix mobius(const Signature& sig, const CMatrix& u_inv, const CMatrix& pair_value) {
  if (pair_value.rows() != sig.m() || pair_value.cols() != sig.m1) {
    throw ValidationError("weyl-direct", "pair value must be m x m1");
  }
  const CMatrix w = u_inv * pair_value;
  const CMatrix top = w.topRows(sig.m1);
  if (condition_number(top) > 1e12) {
    throw PreconditionError("weyl-direct", "Mobius denominator [I 0]u^{-1}P is singular");
  }
  // Right division: bottom * top^{-1} = (top^{-*} bottom^*)^*.
  return top.adjoint().partialPivLu().solve(w.bottomRows(sig.m2).adjoint()).adjoint();
}

double ball_form(const Signature& sig, const CMatrix& gram, const CMatrix& phi) {
  CMatrix pair(sig.m(), sig.m1);
  pair.topRows(sig.m1).setIdentity();
  pair.bottomRows(sig.m2) = phi;
  return min_eigenvalue(pair.adjoint() * gram * pair);
}

WeylSample weyl_function(const PotentialGrid& grid, cplx z, double target_radius, double margin) {
  if (!(target_radius > 0.0)) throw ValidationError("weyl-direct", "target radius must be positive");
  if (!(z.imag() - grid.norm_bound() >= margin) || !(z.imag() - grid.norm_bound() > 0.0)) {
    throw DomainError("weyl-direct", "z = " + z_str(z) + " is too close to the half-plane Im z > " +
                                         std::to_string(grid.norm_bound()) + " (margin " +
                                         std::to_string(margin) + ")");
  }
  const Signature& sig = grid.signature();
  CMatrix u = CMatrix::Identity(grid.m(), grid.m());
  CMatrix uc = u;  // u(x, conj z)
  WeylSample out{z, CMatrix::Zero(grid.m2(), grid.m1()), 1.0, true, 0};
  for (int k = 0; k < grid.cells(); ++k) {
    u = cell_factor(grid, k, z) * u;
    uc = cell_factor(grid, k, std::conj(z)) * uc;
    if (!all_finite(u) || !all_finite(uc)) {
      throw OverflowError("weyl-direct", "fundamental solution overflows in cell " + std::to_string(k), k);
    }
    // A^{-1} = u^{-1} j u^{-*} = u(x, conj z)* j u(x, conj z).
    const MatrixBall ball = matrix_ball(sig, gram_from(sig, u), gram_from(sig, uc));
    out.phi = ball.center;
    out.error_bound = ball.radius();
    out.x_index = k + 1;
    if (out.error_bound <= target_radius) {
      out.truncated = false;
      return out;
    }
  }
  return out;
}

CMatrix constant_weyl(const Signature& sig, cplx z, const CMatrix& v) {
  // B = izj + jV has B^2 = -(z^2 + V^2); sign(B) = B (B^2)^{-1/2} with the principal root.
  const CMatrix big_v = sig.assemble_v(v);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(big_v * big_v));
  CVector inv_root(sig.m());
  for (int k = 0; k < sig.m(); ++k) {
    cplx root = std::sqrt(-(z * z + es.eigenvalues()(k)));
    if (root.real() < 0.0) root = -root;
    if (std::abs(root) == 0.0) throw DomainError("weyl-direct", "izj + jV has a purely imaginary eigenvalue");
    inv_root(k) = 1.0 / root;
  }
  const CMatrix sign = sig.coefficient(z, v) * es.eigenvectors() * inv_root.asDiagonal() *
                       es.eigenvectors().adjoint();
  const CMatrix proj = 0.5 * (CMatrix::Identity(sig.m(), sig.m()) - sign);
  const CMatrix top = proj.topLeftCorner(sig.m1, sig.m1);
  const CMatrix bottom = proj.bottomLeftCorner(sig.m2, sig.m1);
  if (condition_number(top) > 1e12) {
    throw DomainError("weyl-direct", "decaying subspace is not a graph over the first block");
  }
  return top.adjoint().partialPivLu().solve(bottom.adjoint()).adjoint();
}

CMatrix weyl_member(const PotentialGrid& grid, cplx z, int x_index, Continuation tail) {
  if (x_index < 0) x_index = grid.cells();
  if (x_index > grid.cells()) throw ValidationError("weyl-direct", "x index out of range");
  const int m1 = grid.m1();
  const int m2 = grid.m2();
  CMatrix psi = tail == Continuation::constant ? constant_weyl(grid.signature(), z, grid.node(x_index))
                                               : CMatrix::Zero(m2, m1);
  for (int k = x_index - 1; k >= 0; --k) {
    const CMatrix t = expm(-grid.step() * grid.signature().coefficient(z, grid.cell(k)));
    const CMatrix den = t.topLeftCorner(m1, m1) + t.topRightCorner(m1, m2) * psi;
    const CMatrix num = t.bottomLeftCorner(m2, m1) + t.bottomRightCorner(m2, m2) * psi;
    psi = den.adjoint().partialPivLu().solve(num.adjoint()).adjoint();
  }
  return psi;
}

double l2_criterion(const PotentialGrid& grid, const CMatrix& phi, cplx z) {
  CMatrix pair(grid.m(), grid.m1());
  pair.topRows(grid.m1()).setIdentity();
  pair.bottomRows(grid.m2()) = phi;
  const Propagator p(grid, z);
  const double h = grid.step();
  double sum = 0.0;
  for (int k = 0; k <= grid.cells(); ++k) {
    const double w = (k == 0 || k == grid.cells()) ? 0.5 * h : h;
    sum += w * (p.u(k) * pair).squaredNorm();
  }
  return sum;
}

}  // namespace skewdirac
