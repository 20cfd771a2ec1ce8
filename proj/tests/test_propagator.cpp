#include "support/oracles.hpp"

#include <skewdirac/errors.hpp>
#include <skewdirac/propagator.hpp>
#include <skewdirac/random_potential.hpp>

#include <doctest.h>

using namespace skewdirac;

namespace {

CMatrix scalar(double value) { return CMatrix::Constant(1, 1, value); }

PotentialGrid smooth_grid(int n) {
  return PotentialGrid::from_function(1, 2, 1.0, n, [](double x) {
    CMatrix v(1, 2);
    v << cplx(0.4 * std::cos(3 * x), 0.2 * x), cplx(0.3 * std::sin(2 * x), -0.1);
    return v;
  });
}

}  // namespace

TEST_CASE("zero potential propagates as a diagonal exponential") {
  const auto g = PotentialGrid::zero(1, 1, 1.0, 16);
  const CMatrix u = propagate(g, 16, cplx(0, 1));
  CHECK(std::abs(u(0, 0) - std::exp(-1.0)) < 1e-14);
  CHECK(std::abs(u(1, 1) - std::exp(1.0)) < 1e-13);
  CHECK(std::abs(u(0, 1)) + std::abs(u(1, 0)) == 0.0);
}

TEST_CASE("u(0, z) is the identity") {
  std::mt19937_64 rng(31);
  const auto g = random_cellwise_potential(rng, 2, 3, 1.0, 10, 1.0);
  CHECK((propagate(g, 0, cplx(3, -7)) - CMatrix::Identity(5, 5)).norm() == 0.0);
}

TEST_CASE("constant potential matches the dense exponential of the coefficient") {
  const auto g = PotentialGrid::constant(1.0, 50, scalar(0.5));
  CMatrix a(2, 2);
  a << -2.0, 0.5, -0.5, 2.0;
  const CMatrix ref = oracle::expm(a);
  const CMatrix u = propagate(g, 50, cplx(0, 2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(u(i, j) - ref(i, j)) < 1e-10);
}

TEST_CASE("Gram matrix examples") {
  const auto g = PotentialGrid::zero(1, 1, 2.0, 20);
  const double eta = 1.5;
  for (int k : {0, 7, 20}) {
    const CMatrix a = weyl_gram(g, k, cplx(0, eta));
    CHECK(std::abs(a(0, 0) - std::exp(-2 * eta * g.x(k))) < 1e-12);
    CHECK(std::abs(a(1, 1) + std::exp(2 * eta * g.x(k))) < 1e-10 * std::exp(2 * eta * g.x(k)));
  }
  std::mt19937_64 rng(32);
  const auto r = random_cellwise_potential(rng, 2, 2, 1.0, 8, 1.0);
  CHECK((weyl_gram(r, 0, cplx(1, 2)) - r.signature().j()).norm() == 0.0);
}

TEST_CASE("inverse identity u(x, conj z)* u(x, z) = I on random potentials") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const int m1 = 1 + trial % 3, m2 = 1 + (trial / 3) % 3;
    const auto g = random_cellwise_potential(rng, m1, m2, 1.0, 30, 1.0);
    const cplx z(std::uniform_real_distribution<double>(-3, 3)(rng), std::uniform_real_distribution<double>(-3, 3)(rng));
    const Propagator u(g, z), uc(g, std::conj(z));
    for (int k = 0; k <= 30; ++k) {
      CHECK((uc.u(k).adjoint() * u.u(k) - CMatrix::Identity(m1 + m2, m1 + m2)).norm() < 1e-10);
    }
  }
}

TEST_CASE("j - A(x, z) >= 0 and A is nonincreasing in x for Im z > M") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = random_cellwise_potential(rng, 1, 2, 1.0, 40, 1.0);
    const Propagator u(g, cplx(0, 3));
    const CMatrix j = g.signature().j();
    CMatrix prev = j;
    for (int k = 0; k <= 40; ++k) {
      const CMatrix a = u.u(k).adjoint() * j * u.u(k);
      CHECK(oracle::min_eig(j - a) >= -1e-9);
      CHECK(oracle::min_eig(prev - a) >= -1e-9);
      prev = a;
    }
  }
}

TEST_CASE("overflow names the offending cell") {
  const auto g = PotentialGrid::zero(1, 1, 1000.0, 100);
  try {
    (void)propagate(g, 100, cplx(0, 2));
    FAIL("expected an overflow");
  } catch (const OverflowError& e) {
    CHECK(e.index() > 0);
    CHECK(e.index() < 100);
    CHECK(std::string(e.what()).find("cell") != std::string::npos);
  }
}

TEST_CASE("boundary rows") {
  const auto zero = boundary_rows(PotentialGrid::zero(2, 1, 1.0, 10));
  for (const auto& b : zero.beta) CHECK((b - CMatrix::Identity(2, 3)).norm() == 0.0);
  for (const auto& c : zero.gamma) CHECK((c - CMatrix::Identity(3, 3).bottomRows(1)).norm() == 0.0);

  const double c = 0.5;
  const auto g = PotentialGrid::constant(1.0, 20, scalar(c));
  const auto rows = boundary_rows(g);
  CMatrix jv(2, 2);
  jv << 0.0, c, -c, 0.0;
  for (int k = 0; k <= 20; ++k) {
    const CMatrix ref = oracle::expm(g.x(k) * jv);
    CHECK((rows.beta[static_cast<std::size_t>(k)] - ref.topRows(1)).norm() < 1e-12);
    CHECK((rows.gamma[static_cast<std::size_t>(k)] - ref.bottomRows(1)).norm() < 1e-12);
    CHECK(std::abs((rows.beta[static_cast<std::size_t>(k)] * rows.beta[static_cast<std::size_t>(k)].adjoint())(0, 0) - 1.0) < 1e-10);
  }
  CHECK(rows.orthogonality_defect() < 1e-12);
}

TEST_CASE("beta' gamma* reproduces v to second order; beta' beta* and gamma' gamma* vanish") {
  std::vector<double> errors;
  for (int n : {40, 80, 160}) {
    const auto g = smooth_grid(n);
    const auto rows = boundary_rows(g);
    const double h = g.step();
    double err = 0.0, self = 0.0;
    for (int k = 1; k < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const CMatrix db = (rows.beta[kk + 1] - rows.beta[kk - 1]) / (2 * h);
      const CMatrix dg = (rows.gamma[kk + 1] - rows.gamma[kk - 1]) / (2 * h);
      err = std::max(err, oracle::opnorm(db * rows.gamma[kk].adjoint() - g.node(k)));
      self = std::max({self, oracle::opnorm(db * rows.beta[kk].adjoint()), oracle::opnorm(dg * rows.gamma[kk].adjoint())});
    }
    errors.push_back(err);
    CHECK(self < 10 * h * h);
  }
  CHECK(errors[0] / errors[1] > 3.0);
  CHECK(errors[1] / errors[2] > 3.0);
}

TEST_CASE("grid refinement changes u(l, z) by O(h^2)") {
  const cplx z(1, 2);
  const CMatrix u1 = propagate(smooth_grid(50), 50, z);
  const CMatrix u2 = propagate(smooth_grid(100), 100, z);
  const CMatrix u3 = propagate(smooth_grid(200), 200, z);
  const double ratio = (u1 - u2).norm() / (u2 - u3).norm();
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}
