#include "support/oracles.hpp"

#include <skewdirac/errors.hpp>
#include <skewdirac/csv.hpp>
#include <skewdirac/nls.hpp>
#include <skewdirac/weyl.hpp>

#include <doctest.h>

#include <filesystem>

using namespace skewdirac;

namespace {

/// Independent plane-wave propagator: with D = exp(-i w t j / 2), w = A^2,
/// F(t) = D F(0) D* and R(t) = D exp(t (F(0) + i w j / 2)).
CMatrix plane_wave_R(int m1, int m2, double amp, cplx z, double t) {
  const int m = m1 + m2;
  CMatrix j = CMatrix::Identity(m, m);
  j.bottomRightCorner(m2, m2) *= -1.0;
  CMatrix v = CMatrix::Zero(m, m);
  v.topRightCorner(m1, m2) = amp * CMatrix::Identity(m1, m2);
  v.bottomLeftCorner(m2, m1) = amp * CMatrix::Identity(m2, m1);
  const CMatrix f0 = oracle::I * (z * z * j - oracle::I * z * j * v - 0.5 * j * v * v);
  const double w = amp * amp;
  const CMatrix d = oracle::expm(-oracle::I * w * t / 2.0 * j);
  return d * oracle::expm(t * (f0 + oracle::I * w / 2.0 * j));
}

}  // namespace

TEST_CASE("zero-curvature pair symmetries") {
  std::mt19937_64 rng(71);
  const ZeroCurvaturePair pair{{2, 1}};
  const CMatrix v = oracle::random_matrix(rng, 2, 1), vx = oracle::random_matrix(rng, 2, 1);
  const cplx z(0.7, -1.3);
  CHECK((pair.f(std::conj(z), v, vx).adjoint() + pair.f(z, v, vx)).norm() < 1e-14);
  CHECK((pair.g(std::conj(z), v).adjoint() + pair.g(z, v)).norm() < 1e-14);
}

TEST_CASE("zero-curvature residuals") {
  CHECK(zero_curvature_residual(SolutionModel::zero(2, 2), 0.1, 0.2, cplx(2, 3), 1e-3) == 0.0);
  const SolutionModel wave = SolutionModel::plane_wave(1, 1, 1.0);
  CHECK(zero_curvature_residual(wave, 0.0, 0.0, cplx(2, 3), 1e-3) <= 1e-5);
  CHECK(zero_curvature_residual(SolutionModel::plane_wave(2, 3, 0.8), 0.4, 0.1, cplx(-1, 2), 1e-3) <= 1e-5);

  const SolutionModel corrupted = SolutionModel::custom(
      "corrupted", 1, 1,
      [wave](double x, double t) { return ((t > 0.0 ? 1.1 : 1.0) * wave.v(x, t)).eval(); },
      [wave](double x, double t) { return ((t > 0.0 ? 1.1 : 1.0) * wave.vx(x, t)).eval(); });
  CHECK(zero_curvature_residual(corrupted, 0.0, 0.0, cplx(2, 3), 1e-3) >= 1e-2);
}

TEST_CASE("R for the zero model and for T = 0") {
  const cplx z(1.0, 2.0);
  const double t = 0.3;
  const TimePropagator p = evolve_R(SolutionModel::zero(1, 2), z, t, 600);
  CMatrix ref = CMatrix::Zero(3, 3);
  ref.diagonal() << std::exp(oracle::I * z * z * t), std::exp(-oracle::I * z * z * t), std::exp(-oracle::I * z * z * t);
  CHECK((p.back() - ref).norm() / ref.norm() < 1e-12);
  CHECK((p.r.front() - CMatrix::Identity(3, 3)).norm() == 0.0);

  const TimePropagator zero_time = evolve_R(SolutionModel::plane_wave(1, 1, 1.0), z, 0.0, 4);
  for (const auto& r : zero_time.r) CHECK((r - CMatrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("plane-wave R matches the gauge-transformed exponential") {
  for (auto [m1, m2] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 3}}) {
    const cplx z(1.5, 2.0);
    const double t = 0.2;
    const TimePropagator p = evolve_R(SolutionModel::plane_wave(m1, m2, 1.0), z, t, 100);
    const TimePropagator fine = evolve_R(SolutionModel::plane_wave(m1, m2, 1.0), z, t, 1600);
    const CMatrix ref = plane_wave_R(m1, m2, 1.0, z, t);
    CHECK((p.back() - ref).norm() / ref.norm() < 1e-6);
    CHECK((fine.back() - ref).norm() / ref.norm() < 1e-10);
  }
}

TEST_CASE("R overflow names the time index") {
  try {
    (void)evolve_R(SolutionModel::zero(1, 1), cplx(1e3, 1e3), 10.0, 50);
    FAIL("expected an overflow");
  } catch (const OverflowError& e) {
    CHECK(e.index() >= 0);
    CHECK(std::string(e.what()).find("t index") != std::string::npos);
  }
}

TEST_CASE("linear-fractional evolution: trivial cases") {
  std::mt19937_64 rng(72);
  const CMatrix phi0 = oracle::random_contraction(rng, 2, 1, 0.6);
  CHECK((evolve_weyl(phi0, CMatrix::Identity(3, 3)).phi - phi0).norm() < 1e-15);

  const cplx z(0.5, 4.0);
  const double t = 0.1;
  const TimePropagator p = evolve_R(SolutionModel::zero(1, 2), z, t, 1000);
  CHECK((evolve_weyl(phi0, p.back()).phi - std::exp(-2.0 * oracle::I * z * z * t) * phi0).norm() <= 1e-12 * phi0.norm());
  CHECK(evolve_weyl(CMatrix::Zero(2, 1), p.back()).phi.norm() == 0.0);

  CMatrix swap = CMatrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  CHECK_THROWS_AS(evolve_weyl(CMatrix::Zero(1, 1), swap), ConditioningError);
}

TEST_CASE("plane-wave Weyl function evolves into the direct Weyl function of v(., t)") {
  const cplx z(0, 4);
  const double t = 0.1;
  const SolutionModel wave = SolutionModel::plane_wave(1, 1, 1.0);
  const auto g0 = PotentialGrid::constant(10.0, 400, CMatrix::Constant(1, 1, 1.0));
  const auto gt = PotentialGrid::constant(10.0, 400, CMatrix::Constant(1, 1, std::exp(cplx(0, -t))));
  const CMatrix phi0 = weyl_function(g0, z, 1e-13).phi;
  const EvolvedWeyl ev = evolve_weyl(phi0, evolve_R(wave, z, t, 100).back());
  CHECK(std::abs(ev.phi(0, 0) - weyl_function(gt, z, 1e-13).phi(0, 0)) <= 1e-4);
  CHECK(ev.cond < 10.0);

  // rectangular case against the closed-form constant Weyl function
  const Signature sig{2, 1};
  const cplx zr(1.0, 3.0);
  const CMatrix v0 = 0.8 * CMatrix::Identity(2, 1);
  const CMatrix evolved = evolve_weyl(constant_weyl(sig, zr, v0), evolve_R(SolutionModel::plane_wave(2, 1, 0.8), zr, t, 200).back()).phi;
  CHECK((evolved - constant_weyl(sig, zr, std::exp(cplx(0, -0.64 * t)) * v0)).norm() <= 1e-6);
}

TEST_CASE("group property of the evolution") {
  const cplx z(0.5, 3.0);
  const SolutionModel wave = SolutionModel::plane_wave(1, 2, 0.9);
  const CMatrix phi0 = constant_weyl({1, 2}, z, 0.9 * CMatrix::Identity(1, 2));
  const CMatrix direct = evolve_weyl(phi0, evolve_R(wave, z, 0.2, 200).back()).phi;
  const CMatrix first = evolve_weyl(phi0, evolve_R(wave, z, 0.08, 80).back()).phi;
  const CMatrix second = evolve_weyl(first, evolve_R(wave, z, 0.12, 120, 0.08).back()).phi;
  CHECK((second - direct).norm() <= 1e-6);
}

TEST_CASE("j-contractivity of R in the quarter-plane") {
  for (cplx z : {cplx(1, 3), cplx(3, 3), cplx(5, 5), cplx(2, 6)}) {
    for (const SolutionModel& model : {SolutionModel::zero(1, 1), SolutionModel::plane_wave(1, 1, 1.0), SolutionModel::plane_wave(2, 1, 0.7)}) {
      const TimePropagator p = evolve_R(model, z, 0.3, 300);
      for (int k = 0; k <= 300; k += 30) {
        const CMatrix& r = p.r[static_cast<std::size_t>(k)];
        CHECK(contractivity_excess({model.m1, model.m2}, r) <= 1e-9 * std::max(1.0, r.squaredNorm()));
      }
    }
  }
}

TEST_CASE("evolved true Weyl functions stay non-expansive") {
  // Forward evolution amplifies rounding in phi0 roughly like e^{4 Re z Im z t}, so
  // the window is kept where that factor stays far below 1/eps.
  const SolutionModel wave = SolutionModel::plane_wave(2, 1, 1.0);
  for (auto [z, t] : {std::pair{cplx(1, 2), 0.5}, std::pair{cplx(2, 3), 0.5}, std::pair{cplx(4, 4), 0.1}}) {
    const CMatrix phi0 = constant_weyl({2, 1}, z, CMatrix::Identity(2, 1));
    const TimePropagator p = evolve_R(wave, z, t, 2000);
    for (int k = 0; k <= 2000; k += 200) {
      const CMatrix phi = evolve_weyl(phi0, p.r[static_cast<std::size_t>(k)]).phi;
      const CMatrix direct = constant_weyl({2, 1}, z, std::exp(cplx(0, -p.t(k))) * CMatrix::Identity(2, 1));
      CHECK(oracle::opnorm(phi) <= 1.0 + 1e-9);
      CHECK((phi - direct).norm() < 1e-8);
    }
  }
}

TEST_CASE("forward evolution amplifies perturbations of phi0 in the quarter-plane") {
  const cplx z(4, 4);
  const double t = 0.1;
  const CMatrix phi0 = constant_weyl({1, 1}, z, CMatrix::Identity(1, 1));
  const CMatrix r = evolve_R(SolutionModel::plane_wave(1, 1, 1.0), z, t, 400).back();
  const double delta = 1e-10;
  const CMatrix moved = evolve_weyl((phi0.array() + delta).matrix(), r).phi - evolve_weyl(phi0, r).phi;
  CHECK(moved.norm() / delta > 0.1 * std::exp(4.0 * z.real() * z.imag() * t));
}

TEST_CASE("sampled models interpolate boundary data") {
  const auto path = std::filesystem::temp_directory_path() / "skewdirac_samples.csv";
  const double amp = 1.0;
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= 400; ++k) {
    const double t = k * 0.001;
    const cplx v = amp * std::exp(cplx(0, -amp * amp * t));
    rows.push_back({t, v.real(), v.imag(), 0.0, 0.0, 0.0, 0.0});
  }
  csv::write(path, {"t", "re_v_0_0", "im_v_0_0", "re_vx_0_0", "im_vx_0_0", "re_vxx_0_0", "im_vxx_0_0"}, rows);
  const SolutionModel sampled = SolutionModel::sampled(path, 1, 1);
  CHECK_FALSE(sampled.x_resolved);
  REQUIRE(sampled.nls_residual_diagnostic().has_value());
  CHECK(*sampled.nls_residual_diagnostic() < 1e-5);
  CHECK(zero_curvature_residual(sampled, 0.0, 0.2, cplx(2, 3), 1e-3) < 1e-4);

  const cplx z(0, 3);
  const CMatrix a = evolve_R(sampled, z, 0.3, 300).back();
  const CMatrix b = evolve_R(SolutionModel::plane_wave(1, 1, amp), z, 0.3, 300).back();
  CHECK((a - b).norm() / b.norm() < 1e-5);
  CHECK_THROWS_AS(evolve_R(sampled, z, 1.0, 10), ValidationError);

  csv::write(path, {"t", "re_v_0_0", "im_v_0_0", "re_vx_0_0", "im_vx_0_0"}, {{0, 1, 0, 0, 0}, {1, 1, 0, 0, 0}});
  CHECK_FALSE(SolutionModel::sampled(path, 1, 1).nls_residual_diagnostic().has_value());
}
