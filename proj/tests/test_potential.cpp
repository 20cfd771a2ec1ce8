#include "support/oracles.hpp"

#include <skewdirac/csv.hpp>
#include <skewdirac/errors.hpp>
#include <skewdirac/potential.hpp>
#include <skewdirac/random_potential.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace skewdirac;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "skewdirac_potential_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("signature algebra: j^2 = I and jV = -Vj") {
  std::mt19937_64 rng(21);
  for (auto [m1, m2] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 1}}) {
    const Signature sig{m1, m2};
    const CMatrix j = sig.j();
    const CMatrix v = sig.assemble_v(oracle::random_matrix(rng, m1, m2));
    CHECK((j * j - CMatrix::Identity(sig.m(), sig.m())).norm() == 0.0);
    CHECK((j * v + v * j).norm() == 0.0);
    CHECK((v - v.adjoint()).norm() == 0.0);
    const cplx z(0.3, 1.7);
    CHECK((sig.coefficient(z, v.topRightCorner(m1, m2)) - (oracle::I * z * j + j * v)).norm() < 1e-15);
  }
}

TEST_CASE("grid validation") {
  const CMatrix one = CMatrix::Constant(1, 1, 1.0);
  CHECK_THROWS_AS(PotentialGrid::constant(1.0, 1, one), ValidationError);
  CHECK_THROWS_AS(PotentialGrid::constant(0.0, 4, one), ValidationError);
  CHECK_THROWS_AS(PotentialGrid::constant(1.0, 4, one, 0.5), ValidationError);
  CHECK_THROWS_AS(PotentialGrid(1, 1, 1.0, MatrixSeries(3, one), MatrixSeries(3, one)), ValidationError);
  MatrixSeries bad(5, one);
  bad[2](0, 0) = std::nan("");
  CHECK_THROWS_AS(PotentialGrid::from_nodes(1, 1, 1.0, bad), ValidationError);
  CHECK_THROWS_AS(PotentialGrid::from_nodes(2, 1, 1.0, MatrixSeries(5, one)), ValidationError);

  const auto g = PotentialGrid::constant(2.0, 8, 0.75 * one);
  CHECK(g.norm_bound() == doctest::Approx(0.75));
  CHECK(g.step() == doctest::Approx(0.25));
  CHECK(g.truncated(4).length() == doctest::Approx(1.0));
  CHECK(PotentialGrid::constant(2.0, 8, 0.75 * one, 2.0).norm_bound() == 2.0);
}

TEST_CASE("JSON descriptors") {
  const auto zero = potential_from_json(R"({"m1":2,"m2":1,"l":1.5,"n":10,"kind":"zero"})");
  CHECK(zero.m1() == 2);
  CHECK(zero.m2() == 1);
  CHECK(zero.cells() == 10);
  CHECK(zero.max_norm() == 0.0);

  const auto c = potential_from_json(R"({"m1":2,"m2":2,"l":1,"n":4,"kind":"constant","value":[0.5,0.25]})");
  CHECK(std::abs(c.node(3)(0, 0) - cplx(0.5, 0.25)) < 1e-15);
  CHECK(std::abs(c.node(3)(0, 1)) == 0.0);

  const auto full = potential_from_json(
      R"({"m1":1,"m2":2,"l":1,"n":4,"kind":"constant","value":[[0.1,[0,0.2]]],"norm_bound":1})");
  CHECK(std::abs(full.cell(0)(0, 1) - cplx(0, 0.2)) < 1e-15);
  CHECK(full.norm_bound() == 1.0);

  CHECK_THROWS_AS(potential_from_json("{"), ValidationError);
  CHECK_THROWS_AS(potential_from_json(R"({"m1":1,"m2":1,"l":1,"kind":"zero"})"), ValidationError);
  CHECK_THROWS_AS(potential_from_json(R"({"m1":1,"m2":1,"l":1,"n":4,"kind":"wave"})"), ValidationError);
  CHECK_THROWS_AS(potential_from_json(R"({"m1":1,"m2":2,"l":1,"n":4,"kind":"constant","value":[[1]]})"),
                  ValidationError);
}

TEST_CASE("CSV potentials round trip through a descriptor") {
  const auto dir = scratch_dir();
  std::mt19937_64 rng(22);
  MatrixSeries nodes;
  for (int k = 0; k <= 6; ++k) nodes.push_back(oracle::random_contraction(rng, 2, 2, 0.9));
  write_potential_csv(dir / "v.csv", nodes);
  std::ofstream(dir / "v.json") << R"({"m1":2,"m2":2,"l":3,"n":6,"kind":"csv","path":"v.csv","norm_bound":1})";
  const auto g = load_potential(dir / "v.json");
  for (int k = 0; k <= 6; ++k) CHECK((g.node(k) - nodes[static_cast<std::size_t>(k)]).norm() == 0.0);
  CHECK((g.cell(2) - 0.5 * (nodes[2] + nodes[3])).norm() < 1e-16);

  std::ofstream(dir / "short.json") << R"({"m1":2,"m2":2,"l":3,"n":7,"kind":"csv","path":"v.csv"})";
  CHECK_THROWS_AS(load_potential(dir / "short.json"), ValidationError);
}

TEST_CASE("CSV numbers are written with 17 significant digits") {
  CHECK(csv::format(0.1) == "0.10000000000000001");
  CHECK(csv::format(-0.0) == "0");
  CHECK(csv::format(1e300) == "1.0000000000000001e+300");
  const auto t = csv::parse("# comment\na,b\n1,2\n\n+3,-4e-2\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == -0.04);
  CHECK_THROWS_AS(csv::parse("1,2\n3\n"), ValidationError);
  CHECK_THROWS_AS(csv::parse("1,2\nx,y\n"), ValidationError);
}

TEST_CASE("seeded random potentials are reproducible and bounded") {
  std::mt19937_64 a(5), b(5);
  const auto ga = random_cellwise_potential(a, 2, 3, 1.0, 20, 0.8);
  const auto gb = random_cellwise_potential(b, 2, 3, 1.0, 20, 0.8);
  for (int k = 0; k < 20; ++k) CHECK((ga.cell(k) - gb.cell(k)).norm() == 0.0);
  CHECK(ga.max_norm() <= 0.8 + 1e-12);
  const auto f = random_smooth_potential(a, 1, 2, 1.0, 1.0);
  for (int k = 0; k <= 50; ++k) CHECK(oracle::opnorm(f(k / 50.0)) <= 0.9 + 1e-9);
}
