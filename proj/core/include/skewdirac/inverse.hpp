#pragma once

#include "skewdirac/linalg.hpp"
#include "skewdirac/potential.hpp"
#include "skewdirac/snode.hpp"
#include "skewdirac/weyl.hpp"

#include <filesystem>
#include <optional>

namespace skewdirac {

/// Weyl function samples on the line Im z = eta, xi uniform on [-a, a].
struct WeylLineData {
  int m1 = 1;
  int m2 = 1;
  double eta = 0.0;
  double a = 0.0;
  double norm_bound = 0.0;
  RVector xi;
  MatrixSeries phi;  // m2 x m1, phi(xi_j + i eta)
};

/// Samples weyl_member of `grid` on the line. The default constant continuation keeps
/// Phi1 smooth across x = l; a zero continuation puts a kink there that the truncated
/// Fourier integral resolves poorly.
WeylLineData synthesize_line_data(const PotentialGrid& grid, double eta, double a, double dxi,
                                  Continuation tail = Continuation::constant);

/// CSV with columns re_z, im_z, re_phi_i_j, im_phi_i_j[, error_bound]; the layout
/// written by the `direct` subcommand. All rows must share one Im z.
WeylLineData read_line_data(const std::filesystem::path& path, double norm_bound);
void write_line_data(const std::filesystem::path& path, const WeylLineData& data);

struct FourierOptions {
  double tol = 2e-2;           // a-halving certificate on the relative max-norm change
  bool tail_subtraction = true;
  double kappa = 1.0;          // decay of the reference profile D x e^{-kappa x}
};

struct Phi1Recovery {
  Phi1Profile profile;
  double certificate = 0.0;  // relative change between a and a/2
  CMatrix slope;             // estimated Phi1'(0) used by the tail subtraction
};

/// Phi1(y) = (1/pi) e^{2 y eta} int e^{-2 i y xi} phi(xi + i eta) / (2i(xi + i eta)) dxi
/// on the nodes of [0, l]. Throws TruncationError when the a/2 rerun moves the
/// result by more than opts.tol.
Phi1Recovery recover_phi1_report(const WeylLineData& data, double l, int n,
                                 const FourierOptions& opts = {});
Phi1Profile recover_phi1(const WeylLineData& data, double l, int n, const FourierOptions& opts = {});

/// The forward map Phi1 -> 2iz int_0^l e^{2ixz} Phi1(x) dx, with the exponential
/// integrated exactly against the piecewise-linear interpolant of Phi1.
CMatrix forward_transform(const Phi1Profile& profile, cplx z);

struct BetaRecovery {
  MatrixSeries beta;       // m1 x m
  double defect = 0.0;     // max ||beta beta* - I||
};

/// beta(x) = [I 0] - int_0^x (S_x^{-1} Phi1')(t)* [Phi1(t) I] dt, node by node.
BetaRecovery recover_beta(const Phi1Profile& profile, const SKernel& s);

struct GammaRecovery {
  MatrixSeries gamma;          // m2 x m
  double gamma_defect = 0.0;   // max ||gamma gamma* - I||
  double cross_defect = 0.0;   // max ||beta gamma*||
  double derivative_defect = 0.0;  // max interior ||gamma' gamma*||
};

/// Orthonormal completion gamma with gamma' gamma* = 0, gamma(0) = [0 I].
GammaRecovery complete_gamma(const MatrixSeries& beta, double h);

struct RecoveredPotential {
  double h = 0.0;
  MatrixSeries v;  // m1 x m2 at nodes; v.front() and v.back() are one-sided (lower confidence)
  MatrixSeries beta;
  MatrixSeries gamma;
  double beta_defect = 0.0;
  double gamma_defect = 0.0;
  double cross_defect = 0.0;
  double derivative_defect = 0.0;
  double fourier_certificate = 0.0;
  double max_norm = 0.0;
  double s_min_eigenvalue = 0.0;
};

/// v = beta' gamma*, central differences inside, second-order one-sided at the ends.
RecoveredPotential recover_potential(const MatrixSeries& beta, const MatrixSeries& gamma, double h);

struct PipelineOptions {
  FourierOptions fourier;
  bool check_s_spectrum = false;  // adds a full eigenvalue solve of S
};

RecoveredPotential inverse_pipeline(const WeylLineData& data, double l, int n,
                                    const PipelineOptions& opts = {});

/// Relative L2 error of `estimate` against `truth` over the nodes in [lo, hi] * l.
double relative_l2_error(const MatrixSeries& estimate, const MatrixSeries& truth, double lo = 0.0,
                         double hi = 1.0);
double max_error(const MatrixSeries& estimate, const MatrixSeries& truth, double lo = 0.0,
                 double hi = 1.0);

}  // namespace skewdirac
