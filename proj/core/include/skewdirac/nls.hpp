#pragma once

#include "skewdirac/linalg.hpp"
#include "skewdirac/potential.hpp"

#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace skewdirac {

using FieldFn = std::function<CMatrix(double x, double t)>;

/// A (claimed) solution v(x, t) of 2 v_t + i(v_xx + 2 v v* v) = 0.
///
/// Analytic models provide v and v_x everywhere. Sampled models only know
/// v(0, t), v_x(0, t) and optionally v_xx(0, t) on a t-grid (linear interpolation
/// between samples); they are not x-resolved.
struct SolutionModel {
  std::string kind;
  int m1 = 1;
  int m2 = 1;
  double amplitude = 0.0;
  bool x_resolved = true;
  FieldFn v;
  FieldFn vx;
  FieldFn vxx;  // may be empty

  static SolutionModel zero(int m1, int m2);
  /// v = A e^{-i A^2 t} U with U the rectangular identity (a partial isometry).
  static SolutionModel plane_wave(int m1, int m2, double amplitude);
  static SolutionModel custom(std::string kind, int m1, int m2, FieldFn v, FieldFn vx, FieldFn vxx = {});
  /// CSV columns t, re_v_i_j, im_v_i_j, re_vx_i_j, im_vx_i_j[, re_vxx_i_j, im_vxx_i_j].
  static SolutionModel sampled(const std::filesystem::path& path, int m1, int m2);

  /// max over interior samples of ||2 v_t + i(v_xx + 2 v v* v)|| at x = 0, for
  /// sampled models that carry v_xx; nullopt otherwise.
  std::optional<double> nls_residual_diagnostic() const;

  double t_min = -std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();
  std::vector<double> sample_times;
};

/// G = izj + jV and F = i(z^2 j - iz jV - (V_x + j V^2)/2).
struct ZeroCurvaturePair {
  Signature sig;
  CMatrix g(cplx z, const CMatrix& v) const;
  CMatrix f(cplx z, const CMatrix& v, const CMatrix& vx) const;
};

/// ||G_t - F_x + [G, F]|| at (x, t) with central differences of step h. For models
/// that are not x-resolved F_x is formed from v, v_x, v_xx at x = 0.
double zero_curvature_residual(const SolutionModel& model, double x, double t, cplx z, double h);

/// R on the uniform grid t0 + k dt, k = 0..nt.
struct TimePropagator {
  cplx z;
  double t0 = 0.0;
  double dt = 0.0;
  MatrixSeries r;

  double t(int k) const { return t0 + k * dt; }
  const CMatrix& back() const { return r.back(); }
};

/// R_t = F(0, t, z) R, R(t0) = I, classical RK4. OverflowError names the t index.
TimePropagator evolve_R(const SolutionModel& model, cplx z, double T, int nt, double t0 = 0.0);

struct EvolvedWeyl {
  CMatrix phi;
  double cond = 0.0;
};

inline constexpr double kDefaultCondCap = 1e8;

/// (R21 + R22 phi0)(R11 + R12 phi0)^{-1}; ConditioningError above the cap.
EvolvedWeyl evolve_weyl(const CMatrix& phi0, const CMatrix& r, double cond_cap = kDefaultCondCap);

/// Largest eigenvalue of R* j R - j (<= 0 means j-contractive).
double contractivity_excess(const Signature& sig, const CMatrix& r);

}  // namespace skewdirac
