#include "skewdirac/random_potential.hpp"

#include "skewdirac/errors.hpp"

#include <cmath>
#include <numbers>

namespace skewdirac {

double uniform_sample(std::mt19937_64& rng) {
  // 53 random bits -> [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal_sample(std::mt19937_64& rng) {
  double u1 = uniform_sample(rng);
  while (u1 <= 0.0) u1 = uniform_sample(rng);
  const double u2 = uniform_sample(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

CMatrix gaussian_matrix(std::mt19937_64& rng, int m1, int m2) {
  CMatrix a(m1, m2);
  for (int i = 0; i < m1; ++i) {
    for (int j = 0; j < m2; ++j) {
      const double re = normal_sample(rng);
      const double im = normal_sample(rng);
      a(i, j) = {re, im};
    }
  }
  return a;
}

}  // namespace

std::function<CMatrix(double)> random_smooth_potential(std::mt19937_64& rng, int m1, int m2, double l,
                                                       double norm_bound, double fill, int modes) {
  if (m1 < 1 || m2 < 1 || !(l > 0.0) || !(norm_bound > 0.0) || modes < 1) {
    throw ValidationError("dirac-core", "bad random potential parameters");
  }
  std::vector<CMatrix> cs, ss;
  for (int k = 0; k < modes; ++k) {
    const double decay = 1.0 / (1.0 + k * k);
    cs.push_back(decay * gaussian_matrix(rng, m1, m2));
    ss.push_back(decay * gaussian_matrix(rng, m1, m2));
  }
  auto eval = [cs, ss, l](double x) {
    CMatrix v = cs[0];
    for (std::size_t k = 1; k < cs.size(); ++k) {
      const double arg = static_cast<double>(k) * std::numbers::pi * x / l;
      v += std::cos(arg) * cs[k] + std::sin(arg) * ss[k];
    }
    return v;
  };
  double peak = 0.0;
  for (int k = 0; k <= 2000; ++k) peak = std::max(peak, op_norm(eval(l * k / 2000.0)));
  const double scale = peak > 0.0 ? fill * norm_bound / peak : 0.0;
  return [eval, scale](double x) { return (scale * eval(x)).eval(); };
}

PotentialGrid random_cellwise_potential(std::mt19937_64& rng, int m1, int m2, double l, int n,
                                        double norm_bound) {
  if (n < 2) throw ValidationError("dirac-core", "need at least 2 cells");
  MatrixSeries cells;
  for (int k = 0; k < n; ++k) {
    CMatrix a = gaussian_matrix(rng, m1, m2);
    const double nrm = op_norm(a);
    const double target = norm_bound * uniform_sample(rng);
    cells.push_back(nrm > 0.0 ? (target / nrm * a).eval() : a);
  }
  MatrixSeries nodes;
  nodes.push_back(cells.front());
  for (int k = 1; k < n; ++k) nodes.push_back(0.5 * (cells[static_cast<std::size_t>(k - 1)] + cells[static_cast<std::size_t>(k)]));
  nodes.push_back(cells.back());
  return PotentialGrid(m1, m2, l, std::move(nodes), std::move(cells), norm_bound);
}

}  // namespace skewdirac
