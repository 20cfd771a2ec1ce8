#include "support/oracles.hpp"

#include <skewdirac/errors.hpp>
#include <skewdirac/propagator.hpp>
#include <skewdirac/snode.hpp>

#include <doctest.h>

using namespace skewdirac;

namespace {

Phi1Profile bessel_profile(double c, int n) {
  return make_profile([c](double x) { return CMatrix::Constant(1, 1, oracle::bessel_phi1(c, x)).eval(); },
                      [c](double x) { return CMatrix::Constant(1, 1, oracle::bessel_dphi1(c, x)).eval(); }, 1.0, n);
}

/// A smooth 2 x 1 profile with Phi1(0) = 0.
Phi1Profile smooth_profile(int n) {
  auto phi = [](double x) {
    CMatrix p(2, 1);
    p << cplx(0.6 * x - 0.3 * x * x, 0.2 * std::sin(x)), cplx(-0.4 * x, 0.25 * x * x);
    return p;
  };
  auto dphi = [](double x) {
    CMatrix p(2, 1);
    p << cplx(0.6 - 0.6 * x, 0.2 * std::cos(x)), cplx(-0.4, 0.5 * x);
    return p;
  };
  return make_profile(phi, dphi, 1.0, n);
}

/// Dense discretization of A S - S A* + i Pi Pi* assembled from the kernel samples,
/// in the trapezoid-weighted norm.
double dense_identity_residual(const Phi1Profile& p, const SKernel& s) {
  const int n = p.cells(), m1 = p.m1(), m2 = p.m2();
  const double h = p.h;
  const int size = (n + 1) * m2;
  Eigen::VectorXd w(size);
  for (int a = 0; a <= n; ++a) w.segment(a * m2, m2).setConstant(a == 0 || a == n ? h / 2 : h);
  CMatrix a_op = CMatrix::Zero(size, size), s_op = CMatrix::Identity(size, size), pi(size, m1 + m2);
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) {
      s_op.block(a * m2, b * m2, m2, m2) += s.kernel(a, b) * w(b * m2);
      if (b <= a && a > 0) {
        const double wt = (b == 0 || b == a) ? h / 2 : h;
        a_op.block(a * m2, b * m2, m2, m2) = -oracle::I * wt * CMatrix::Identity(m2, m2);
      }
    }
    pi.block(a * m2, 0, m2, m1) = p.values[static_cast<std::size_t>(a)];
    pi.block(a * m2, m1, m2, m2).setIdentity();
  }
  const CMatrix wd = w.cast<cplx>().asDiagonal();
  const CMatrix a_adj = w.cwiseInverse().cast<cplx>().asDiagonal() * a_op.adjoint() * wd;
  const CMatrix r = a_op * s_op - s_op * a_adj + oracle::I * pi * pi.adjoint() * wd;
  const Eigen::VectorXd sq = w.cwiseSqrt();
  return oracle::opnorm(sq.cast<cplx>().asDiagonal() * r * sq.cwiseInverse().cast<cplx>().asDiagonal());
}

}  // namespace

TEST_CASE("S = I for the zero profile") {
  const Phi1Profile p = make_profile(MatrixSeries(11, CMatrix::Zero(2, 1)), 0.1);
  const SKernel s = s_kernel(p);
  CHECK((s.matrix() - CMatrix::Identity(22, 22)).norm() == 0.0);
  CHECK(s.min_eigenvalue() == doctest::Approx(1.0));
}

TEST_CASE("linear profile gives s(x, t) = |c|^2 min(x, t)") {
  const cplx c(0.3, -0.4);
  const int n = 20;
  MatrixSeries values;
  for (int k = 0; k <= n; ++k) values.push_back(CMatrix::Constant(1, 1, c * (k / double(n))));
  const SKernel s = s_kernel(make_profile(values, 1.0 / n));
  for (int a = 0; a <= n; a += 3) {
    for (int b = 0; b <= n; b += 4) {
      CHECK(std::abs(s.kernel(a, b)(0, 0) - std::norm(c) * std::min(a, b) / double(n)) < 1e-13);
    }
  }
}

TEST_CASE("kernel samples match quadrature of the convolution to second order") {
  const double c = 0.5;
  auto exact = [c](double x, double t) {
    return oracle::gauss([&](double zeta) { return oracle::bessel_dphi1(c, x - zeta) * oracle::bessel_dphi1(c, t - zeta); }, 0.0,
                         std::min(x, t), 40);
  };
  std::vector<double> errs;
  for (int n : {40, 80}) {
    const SKernel s = s_kernel(bessel_profile(c, n));
    double err = 0.0;
    for (auto [a, b] : {std::pair{n / 2, n}, std::pair{n, n / 4}, std::pair{3 * n / 4, 3 * n / 4}}) {
      err = std::max(err, std::abs(s.kernel(a, b)(0, 0) - exact(a / double(n), b / double(n))));
    }
    errs.push_back(err);
  }
  CHECK(errs[1] < 1e-4);
  CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("kernel matrix is Hermitian and its factor reproduces it") {
  const SKernel s = s_kernel(smooth_profile(30));
  CHECK((s.matrix() - s.matrix().adjoint()).norm() < 1e-14);
  CHECK((s.cholesky() * s.cholesky().adjoint() - s.matrix()).norm() < 1e-12);
}

TEST_CASE("leading-block solves agree with dense solves of S_x") {
  const Phi1Profile p = smooth_profile(24);
  const SKernel s = s_kernel(p);
  const int m2 = 2;
  std::mt19937_64 rng(61);
  for (int k : {1, 5, 24}) {
    // S_x on nodes 0..k: I + sum_b s(a, b) w_b with trapezoid weights of [0, x_k].
    const int size = (k + 1) * m2;
    CMatrix op = CMatrix::Identity(size, size);
    for (int a = 0; a <= k; ++a) {
      for (int b = 0; b <= k; ++b) {
        const double w = (b == 0 || b == k) ? p.h / 2 : p.h;
        op.block(a * m2, b * m2, m2, m2) += w * s.kernel(a, b);
      }
    }
    const CMatrix rhs = oracle::random_matrix(rng, size, 3);
    CHECK((op * s.solve(k, rhs) - rhs).norm() < 1e-11 * rhs.norm());
  }
  CHECK((s.solve(0, CMatrix::Ones(2, 1)) - CMatrix::Ones(2, 1)).norm() == 0.0);
}

TEST_CASE("operator identity residual is O(h) with S positive definite") {
  std::vector<double> res;
  for (int n : {100, 200, 400}) {
    const Phi1Profile p = bessel_profile(0.5, n);
    const SKernel s = s_kernel(p);
    const double r = snode_identity_residual(p, s);
    if (n <= 200) CHECK(std::abs(r - dense_identity_residual(p, s)) < 1e-10);
    CHECK(s.min_eigenvalue() > 0.0);
    res.push_back(r);
  }
  CHECK(std::log2(res[0] / res[1]) >= 0.9);
  CHECK(std::log2(res[1] / res[2]) >= 0.9);
  CHECK(res[2] <= 1.0 * (1.0 / 400));
}

TEST_CASE("S stays positive definite for large oscillating profiles") {
  // s(x, t) is a Gram kernel of Phi1', so S = I + (positive) for any profile.
  const int n = 40;
  MatrixSeries values;
  for (int k = 0; k <= n; ++k) values.push_back(CMatrix::Constant(1, 1, 40.0 * std::sin(9.0 * k / n)));
  const SKernel s = s_kernel(make_profile(values, 1.0 / n));
  CHECK(s.min_eigenvalue() > 0.0);
}

TEST_CASE("profiles whose kernel overflows are rejected") {
  const int n = 20;
  MatrixSeries values;
  for (int k = 0; k <= n; ++k) values.push_back(CMatrix::Constant(1, 1, 1e170 * std::sin(3.0 * k / n)));
  CHECK_THROWS_AS(s_kernel(make_profile(values, 1.0 / n)), IllPosedError);
}

TEST_CASE("resolvent of A: trivial cases") {
  const int n = 50;
  const double h = 0.02;
  std::mt19937_64 rng(62);
  const CMatrix f = oracle::random_matrix(rng, (n + 1) * 2, 3);
  CHECK((resolvent_A(f, 2, h, 0.0) - f).norm() == 0.0);

  const cplx z(1.3, 0.7);
  const CMatrix g = oracle::random_matrix(rng, 2, 1);
  CMatrix constant(2 * (n + 1), 1);
  for (int k = 0; k <= n; ++k) constant.middleRows(2 * k, 2) = g;
  const CMatrix out = resolvent_A(constant, 2, h, z);
  for (int k = 0; k <= n; ++k) CHECK((out.middleRows(2 * k, 2) - std::exp(-oracle::I * (k * h) * z) * g).norm() < 1e-13);
}

TEST_CASE("resolvent inverts the forward Volterra quadrature to second order") {
  const cplx z(2.0, -1.0);
  std::vector<double> errs;
  for (int n : {50, 100, 200}) {
    const double h = 1.0 / n;
    CMatrix f(n + 1, 1), forward(n + 1, 1);
    for (int k = 0; k <= n; ++k) f(k, 0) = cplx(std::cos(3.0 * k * h), k * h * k * h);
    cplx integral = 0.0;
    forward(0, 0) = f(0, 0);
    for (int k = 1; k <= n; ++k) {
      integral += 0.5 * h * (f(k - 1, 0) + f(k, 0));
      forward(k, 0) = f(k, 0) + oracle::I * z * integral;  // (I - zA) f with A = -i int_0^x
    }
    errs.push_back((resolvent_A(forward, 1, h, z) - f).cwiseAbs().maxCoeff());
  }
  CHECK(errs[0] / errs[1] > 3.0);
  CHECK(errs[1] / errs[2] > 3.0);
}

TEST_CASE("transfer matrix: r = 0 and the zero profile") {
  const Phi1Profile p = make_profile(MatrixSeries(41, CMatrix::Zero(2, 1)), 0.025);
  const SKernel s = s_kernel(p);
  const cplx z(0.4, 2.0);
  CHECK((transfer_matrix(p, s, 0, z) - CMatrix::Identity(3, 3)).norm() == 0.0);
  for (int r : {1, 17, 40}) {
    CMatrix ref = CMatrix::Identity(3, 3);
    ref.bottomRightCorner(2, 2) *= std::exp(-oracle::I * (r * 0.025) * z);
    CHECK((transfer_matrix(p, s, r, z) - ref).norm() < 1e-13);
  }
}

TEST_CASE("transfer matrix satisfies w' = -iz H w with H = d/dr (Pi* S_r^-1 P_r Pi)") {
  const cplx z(1.0, 0.5);
  std::vector<double> errs;
  for (int n : {40, 80, 160}) {
    const Phi1Profile p = smooth_profile(n);
    const SKernel s = s_kernel(p);
    const double h = p.h;
    double err = 0.0;
    for (int r : {n / 4, n / 2, 3 * n / 4}) {
      const CMatrix dw = (transfer_matrix(p, s, r + 1, z) - transfer_matrix(p, s, r - 1, z)) / (2 * h);
      const CMatrix hr = (pi_s_pi(p, s, r + 1) - pi_s_pi(p, s, r - 1)) / (2 * h);
      err = std::max(err, (dw + oracle::I * z * hr * transfer_matrix(p, s, r, z)).norm());
    }
    errs.push_back(err);
  }
  CHECK(errs[2] < errs[1]);
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < 5e-2);
}

TEST_CASE("factorization oracle: zero and constant potentials") {
  const auto zero = PotentialGrid::zero(1, 2, 1.0, 100);
  const Phi1Profile flat = make_profile(MatrixSeries(101, CMatrix::Zero(2, 1)), 0.01);
  const SKernel sf = s_kernel(flat);
  for (cplx z : {cplx(0, 3), cplx(2, 1)}) {
    const CMatrix u = propagate(zero, 100, z);
    const CMatrix rhs = std::exp(oracle::I * z) * transfer_matrix(flat, sf, 100, 2.0 * z);
    CHECK((u - rhs).norm() / u.norm() <= 1e-8);
  }

  const double c = 0.5;
  const auto g = PotentialGrid::constant(1.0, 400, CMatrix::Constant(1, 1, c));
  const Phi1Profile p = bessel_profile(c, 400);
  const SKernel s = s_kernel(p);
  const cplx z(0, 3);
  const CMatrix u = propagate(g, 400, z);
  const CMatrix rhs = std::exp(oracle::I * z) * propagate(g, 400, 0.0) * transfer_matrix(p, s, 400, 2.0 * z);
  CHECK((u - rhs).norm() / u.norm() <= 5e-3);
}
