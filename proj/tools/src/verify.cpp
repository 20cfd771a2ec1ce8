#include "detail.hpp"

#include <skewdirac/borg_marchenko.hpp>
#include <skewdirac/csv.hpp>
#include <skewdirac/errors.hpp>
#include <skewdirac/exact.hpp>
#include <skewdirac/inverse.hpp>
#include <skewdirac/nls.hpp>
#include <skewdirac/propagator.hpp>
#include <skewdirac/random_potential.hpp>
#include <skewdirac/snode.hpp>
#include <skewdirac/weyl.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace weylctl::detail {

using namespace skewdirac;

namespace {

constexpr double kStructural = 1e-9;

CMatrix random_contraction(std::mt19937_64& rng, int rows, int cols, bool boundary) {
  CMatrix w(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double re = normal_sample(rng);
      const double im = normal_sample(rng);
      w(i, j) = {re, im};
    }
  }
  const double nrm = op_norm(w);
  if (nrm == 0.0) return w;
  return (boundary ? 1.0 : uniform_sample(rng)) / nrm * w;
}

/// Largest violations of the ball laws for one potential at one z.
struct BallViolations {
  double nesting = 0.0;
  double rho_l = 0.0;
  double rho_r = 0.0;
  double monotonicity = 0.0;
  double inverse_identity = 0.0;
};

BallViolations ball_violations(const PotentialGrid& grid, cplx z, std::mt19937_64& rng) {
  const Signature sig = grid.signature();
  const Propagator u(grid, z);
  const Propagator uc(grid, std::conj(z));
  const int n = grid.cells();
  const double excess = z.imag() - grid.norm_bound();
  BallViolations out;
  MatrixSeries grams;
  std::vector<MatrixBall> balls;
  for (int k = 0; k <= n; ++k) {
    grams.push_back(gram_from(sig, u.u(k)));
    balls.push_back(matrix_ball(sig, grams.back(), gram_from(sig, uc.u(k))));
    const MatrixBall& b = balls.back();
    out.rho_l = std::max(out.rho_l, op_norm(b.rho_l) - 1.0 / std::sqrt(1.0 + 2.0 * excess * grid.x(k)));
    out.rho_r = std::max(out.rho_r, op_norm(b.rho_r) - 1.0);
    const CMatrix id = uc.u(k).adjoint() * u.u(k) - CMatrix::Identity(sig.m(), sig.m());
    out.inverse_identity = std::max(out.inverse_identity, op_norm(id));
    if (k > 0) out.monotonicity = std::max(out.monotonicity, max_eigenvalue(grams[k] - grams[k - 1]));
  }
  const int stride = std::max(1, n / 8);
  for (int k1 = stride; k1 <= n; k1 += stride) {
    for (int trial = 0; trial < 4; ++trial) {
      const CMatrix phi = balls[static_cast<std::size_t>(k1)].member(random_contraction(rng, sig.m2, sig.m1, trial % 2 == 0));
      for (int k2 = 0; k2 <= k1; k2 += stride) {
        out.nesting = std::max(out.nesting, -ball_form(sig, grams[static_cast<std::size_t>(k2)], phi));
      }
    }
  }
  return out;
}

double factorization_residual(const PotentialGrid& grid, const Phi1Profile& profile, const SKernel& s, cplx z) {
  const int n = grid.cells();
  const CMatrix u = propagate(grid, n, z);
  const CMatrix rhs = std::exp(kI * z * grid.length()) * propagate(grid, n, 0.0) * transfer_matrix(profile, s, n, 2.0 * z);
  return (u - rhs).norm() / u.norm();
}

std::vector<double> geometric_heights(double h0, int count, int per_doubling) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(h0 * std::pow(2.0, static_cast<double>(k) / per_doubling));
  return out;
}

double third_ratio(const std::vector<double>& stat) {
  const std::size_t third = std::max<std::size_t>(1, stat.size() / 3);
  const double first = *std::max_element(stat.begin(), stat.begin() + static_cast<std::ptrdiff_t>(third));
  const double last = *std::max_element(stat.end() - static_cast<std::ptrdiff_t>(third), stat.end());
  return first > 0.0 ? last / first : (last > 0.0 ? INFINITY : 0.0);
}

}  // namespace

std::vector<CheckResult> verify_suite(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  std::mt19937_64 rng(seed);

  {
    const PotentialGrid grid = PotentialGrid::zero(2, 1, 1.0, 64);
    double worst = 0.0, bound_ratio = 0.0;
    for (cplx z : {cplx(0, 2), cplx(0, 4), cplx(1, 3)}) {
      const WeylSample s = weyl_function(grid, z, 1e-300);
      worst = std::max(worst, op_norm(s.phi));
      bound_ratio = std::max(bound_ratio, s.error_bound / (2.0 * std::exp(-2.0 * z.imag())));
    }
    checks.push_back(make_check("zero_potential_phi", worst, 1e-10));
    checks.push_back(make_check("zero_potential_error_bound_ratio", bound_ratio, 1.0));
  }

  {
    const double c = 0.5;
    const PotentialGrid grid = PotentialGrid::constant(1.0, 200, CMatrix::Constant(1, 1, c), c);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const cplx z(-4.0 + 8.0 * k / 19.0, 9.0);
      worst = std::max(worst, std::abs(weyl_function(grid, z, 1e-14).phi(0, 0) - scalar_constant_weyl(c, z)));
    }
    checks.push_back(make_check("constant_potential_closed_form", worst, 1e-6));
  }

  {
    BallViolations worst;
    double expansion = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const int m1 = 1 + static_cast<int>(rng() % 3);
      const int m2 = 1 + static_cast<int>(rng() % 3);
      const double bound = 0.5 + uniform_sample(rng);
      const PotentialGrid grid = random_cellwise_potential(rng, m1, m2, 1.0, 40, bound);
      const cplx z(4.0 * uniform_sample(rng) - 2.0, bound + 0.5 + 2.0 * uniform_sample(rng));
      const BallViolations v = ball_violations(grid, z, rng);
      worst.nesting = std::max(worst.nesting, v.nesting);
      worst.rho_l = std::max(worst.rho_l, v.rho_l);
      worst.rho_r = std::max(worst.rho_r, v.rho_r);
      worst.monotonicity = std::max(worst.monotonicity, v.monotonicity);
      worst.inverse_identity = std::max(worst.inverse_identity, v.inverse_identity);
      expansion = std::max(expansion, op_norm(weyl_function(grid, z, 1e-10).phi) - 1.0);
    }
    checks.push_back(make_check("inverse_identity", worst.inverse_identity, kStructural));
    checks.push_back(make_check("gram_monotonicity", worst.monotonicity, kStructural));
    checks.push_back(make_check("ball_nesting", worst.nesting, kStructural));
    checks.push_back(make_check("rho_l_bound", worst.rho_l, kStructural));
    checks.push_back(make_check("rho_r_bound", worst.rho_r, kStructural));
    checks.push_back(make_check("non_expansive", expansion, kStructural));
  }

  {
    const double c = 0.5;
    std::vector<double> residuals;
    double s_min = INFINITY;
    for (int n : {50, 100, 200}) {
      const Phi1Profile profile = scalar_constant_profile(c, 1.0, n);
      const SKernel s = s_kernel(profile);
      residuals.push_back(snode_identity_residual(profile, s));
      s_min = std::min(s_min, s.min_eigenvalue());
    }
    checks.push_back(make_check("snode_identity_order", residuals.back(), residuals.front() * std::pow(0.25, 0.9)));
    checks.push_back(make_check("s_min_eigenvalue", s_min, 1e-8, ">="));

    const PotentialGrid zero = PotentialGrid::zero(1, 2, 1.0, 100);
    const Phi1Profile flat = make_profile(MatrixSeries(101, CMatrix::Zero(2, 1)), 0.01);
    checks.push_back(make_check("factorization_zero", factorization_residual(zero, flat, s_kernel(flat), cplx(1, 3)), 1e-8));

    const PotentialGrid grid = PotentialGrid::constant(1.0, 200, CMatrix::Constant(1, 1, c), c);
    const Phi1Profile profile = scalar_constant_profile(c, 1.0, 200);
    checks.push_back(make_check("factorization_constant", factorization_residual(grid, profile, s_kernel(profile), cplx(0, 3)), 5e-3));
  }

  {
    const double c = 0.5;
    const PotentialGrid grid = PotentialGrid::constant(1.0, 100, CMatrix::Constant(1, 1, c), c);
    const WeylLineData data = synthesize_line_data(grid, c + 1.0, 50.0, 0.1);
    const RecoveredPotential rec = inverse_pipeline(data, 1.0, 100);
    checks.push_back(make_check("roundtrip_constant_l2", relative_l2_error(rec.v, grid.nodes(), 0.05, 0.95), 5e-2));
  }

  {
    auto step = [](double value) { return CMatrix::Constant(1, 1, value).eval(); };
    const PotentialGrid ga = PotentialGrid::from_function(1, 1, 1.0, 8, [&](double) { return step(2.0); }, 2.0);
    const PotentialGrid gb =
        PotentialGrid::from_function(1, 1, 1.0, 8, [&](double x) { return step(x < 0.5 ? 2.0 : -2.0); }, 2.0);
    const BMReport rep = borg_marchenko_check([&](cplx z) { return weyl_member(ga, z); },
                                              [&](cplx z) { return weyl_member(gb, z); }, 1.0, {0.4, 0.6},
                                              geometric_heights(16.0, 9, 8));
    checks.push_back(make_check("bm_agree_r0.4", third_ratio(rep.rows[0].statistic), 1.5));
    checks.push_back(make_check("bm_growth_r0.6", rep.rows[1].growth_per_doubling, 10.0, ">="));
  }

  {
    const cplx z(1, 2);
    const double t = 0.1;
    const TimePropagator prop = evolve_R(SolutionModel::zero(2, 1), z, t, 400);
    CMatrix exact = CMatrix::Zero(3, 3);
    exact.diagonal() << std::exp(kI * z * z * t), std::exp(kI * z * z * t), std::exp(-kI * z * z * t);
    checks.push_back(make_check("nls_zero_exact", (prop.back() - exact).norm() / exact.norm(), 1e-12));

    const SolutionModel wave = SolutionModel::plane_wave(1, 1, 1.0);
    const cplx zw(0, 4);
    const PotentialGrid g0 = PotentialGrid::constant(10.0, 400, CMatrix::Constant(1, 1, 1.0), 1.0);
    const PotentialGrid g1 = PotentialGrid::constant(10.0, 400, CMatrix::Constant(1, 1, std::exp(cplx(0, -0.1))), 1.0);
    const CMatrix phi0 = weyl_function(g0, zw, 1e-13).phi;
    const EvolvedWeyl ev = evolve_weyl(phi0, evolve_R(wave, zw, 0.1, 100).back());
    checks.push_back(make_check("nls_plane_wave_evolution", op_norm(ev.phi - weyl_function(g1, zw, 1e-13).phi), 1e-4));

    const CMatrix half = evolve_weyl(phi0, evolve_R(wave, zw, 0.05, 50).back()).phi;
    const CMatrix composed = evolve_weyl(half, evolve_R(wave, zw, 0.05, 50, 0.05).back()).phi;
    checks.push_back(make_check("nls_group_property", op_norm(composed - ev.phi), 1e-6));
    checks.push_back(make_check("zero_curvature_plane_wave", zero_curvature_residual(wave, 0.3, 0.2, cplx(2, 3), 1e-3), 1e-5));
  }
  return checks;
}

namespace {

struct RecoveredSetup {
  PotentialGrid grid;
  WeylLineData data;
};

RecoveredSetup recovered_setup(const RunConfig& cfg) {
  PotentialGrid grid = load_grid(cfg.potential, cfg.n);
  const double eta = grid.norm_bound() + 1.0;
  WeylLineData data = synthesize_line_data(grid, eta, cfg.a, cfg.dxi);
  return {std::move(grid), std::move(data)};
}

std::vector<CheckResult> single_check(const RunConfig& cfg) {
  if (cfg.potential.empty()) throw ValidationError("cli", "--check needs --potential");
  std::vector<CheckResult> checks;
  if (cfg.check == "radius") {
    const PotentialGrid grid = load_grid(cfg.potential, cfg.n);
    const cplx z = parse_complex(cfg.z);
    if (!(z.imag() > grid.norm_bound())) {
      throw DomainError("weyl-direct", "Im z = " + csv::format(z.imag()) + " is not above M = " + csv::format(grid.norm_bound()));
    }
    std::mt19937_64 rng(cfg.seed);
    const BallViolations v = ball_violations(grid, z, rng);
    const double tol = std::isnan(cfg.tolerance) ? kStructural : cfg.tolerance;
    checks.push_back(make_check("rho_l_bound", v.rho_l, tol));
    checks.push_back(make_check("rho_r_bound", v.rho_r, tol));
    checks.push_back(make_check("ball_nesting", v.nesting, tol));
    return checks;
  }
  const RecoveredSetup setup = recovered_setup(cfg);
  const int n = setup.grid.cells();
  const double l = setup.grid.length();
  if (cfg.check == "p9") {
    if (n % 2 != 0 || n < 8) throw ValidationError("cli", "p9 check needs an even n >= 8");
    const Phi1Profile coarse = recover_phi1(setup.data, l, n / 2);
    const Phi1Profile fine = recover_phi1(setup.data, l, n);
    const SKernel sc = s_kernel(coarse);
    const SKernel sf = s_kernel(fine);
    const double rc = snode_identity_residual(coarse, sc);
    const double rf = snode_identity_residual(fine, sf);
    checks.push_back(make_check("snode_identity_order", rf, rc * std::pow(0.5, 0.9)));
    checks.push_back(make_check("s_min_eigenvalue", std::min(sc.min_eigenvalue(), sf.min_eigenvalue()), 1e-8, ">="));
    return checks;
  }
  const cplx z = parse_complex(cfg.z);
  const Phi1Profile profile = recover_phi1(setup.data, l, n);
  const double tol = std::isnan(cfg.tolerance) ? 5e-3 : cfg.tolerance;
  checks.push_back(make_check("factorization", factorization_residual(setup.grid, profile, s_kernel(profile), z), tol));
  return checks;
}

}  // namespace

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!cfg.all && cfg.check.empty()) throw ValidationError("cli", "verify needs --all or --check");
  const std::vector<CheckResult> checks = cfg.all ? verify_suite(cfg.seed) : single_check(cfg);
  const bool pass = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  nlohmann::json doc;
  doc["seed"] = cfg.seed;
  doc["checks"] = checks_to_json(checks);
  doc["pass"] = pass;
  Sink sink(cfg.report, out);
  sink.stream() << format_json(doc);
  sink.stream().flush();
  if (!pass) {
    std::string failed;
    for (const auto& c : checks) {
      if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.check;
    }
    throw VerificationFailure(failed);
  }
  return kExitOk;
}

}  // namespace weylctl::detail
