#pragma once

#include "skewdirac/linalg.hpp"
#include "skewdirac/potential.hpp"

namespace skewdirac {

/// The Weyl disc {rho_l w rho_r + center : w* w <= I}.
struct MatrixBall {
  CMatrix center;  // m2 x m1
  CMatrix rho_l;   // m2 x m2
  CMatrix rho_r;   // m1 x m1

  /// rho_l w rho_r + center.
  CMatrix member(const CMatrix& omega) const { return rho_l * omega * rho_r + center; }
  double radius() const;  // ||rho_l|| ||rho_r||
};

/// Ball from the Gram matrix alone; rho_r via the Schur complement
/// A11 - A12 A22^{-1} A21, which cancels badly once x Im z is large.
MatrixBall matrix_ball(const Signature& sig, const CMatrix& gram);

/// Same ball with rho_r = ((A^{-1})_11)^{-1/2}, where A^{-1} = u(x, conj z)* j u(x, conj z)
/// is supplied by the caller. Preferred whenever the conjugate solution is at hand.
MatrixBall matrix_ball(const Signature& sig, const CMatrix& gram, const CMatrix& gram_inv);

/// [0 I] u^{-1} P ([I 0] u^{-1} P)^{-1} for an m x m1 pair value P.
CMatrix mobius(const Signature& sig, const CMatrix& u_inv, const CMatrix& pair_value);

/// Smallest eigenvalue of [I phi*] A [I; phi]; nonnegative iff phi lies in the ball of A.
double ball_form(const Signature& sig, const CMatrix& gram, const CMatrix& phi);

struct WeylSample {
  cplx z;
  CMatrix phi;
  double error_bound = 0.0;
  bool truncated = false;
  int x_index = 0;  // node where the ball was taken
};

inline constexpr double kDefaultMargin = 0.25;

/// Center of the smallest ball on [0, l] whose radius product is <= target_radius.
/// Requires Im z >= M + margin.
WeylSample weyl_function(const PotentialGrid& grid, cplx z, double target_radius,
                         double margin = kDefaultMargin);

/// Weyl function on the half-axis of the constant potential v: the bottom/top ratio
/// of the decaying invariant subspace of izj + jV, from the sign-function projector.
CMatrix constant_weyl(const Signature& sig, cplx z, const CMatrix& v);

/// How the potential is continued beyond x_index when selecting a ball member.
enum class Continuation { zero, constant };

/// The member of the ball at x_index selected by the semi-axis Weyl function of the
/// continuation (zero: the pair P = [I; 0]; constant: v frozen at its node value).
/// Computed by composing inverse cell maps from the right end, so it is analytic in
/// z and stable for any x Im z (each step is a contraction). It is the Weyl function
/// of the continued potential and lies in every ball up to x_index.
CMatrix weyl_member(const PotentialGrid& grid, cplx z, int x_index = -1,
                    Continuation tail = Continuation::zero);

/// Trapezoid value of int_0^l tr([I phi*] u* u [I; phi]) dx.
double l2_criterion(const PotentialGrid& grid, const CMatrix& phi, cplx z);

}  // namespace skewdirac
