#include "skewdirac/inverse.hpp"

#include "skewdirac/csv.hpp"
#include "skewdirac/errors.hpp"
#include "skewdirac/parallel.hpp"
#include "skewdirac/weyl.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <regex>

namespace skewdirac {
namespace {

void check_data(const WeylLineData& d) {
  if (d.m1 < 1 || d.m2 < 1) throw ValidationError("inverse", "line data has no shape");
  if (d.xi.size() < 3 || static_cast<std::size_t>(d.xi.size()) != d.phi.size()) {
    throw ValidationError("inverse", "line data needs >= 3 samples with one phi per xi");
  }
  const double dxi = d.xi(1) - d.xi(0);
  if (!(dxi > 0.0)) throw ValidationError("inverse", "xi samples must increase");
  for (Eigen::Index j = 0; j < d.xi.size(); ++j) {
    if (std::abs(d.xi(j) - (d.xi(0) + j * dxi)) > 1e-9 * (1.0 + std::abs(d.xi(j)))) {
      throw ValidationError("inverse", "xi samples must be uniform (sample " + std::to_string(j) + ")");
    }
    const auto& p = d.phi[static_cast<std::size_t>(j)];
    if (p.rows() != d.m2 || p.cols() != d.m1) {
      throw ValidationError("inverse", "phi sample " + std::to_string(j) + " has wrong shape");
    }
  }
}

// The reference profile D x e^{-kappa x} and its transform 2izD/(kappa - 2iz)^2.
CMatrix reference_transform(const CMatrix& slope, double kappa, cplx z) {
  const cplx den = kappa - 2.0 * kI * z;
  return (2.0 * kI * z / (den * den)) * slope;
}

// Kahan-compensated complex matrix accumulator.
struct Compensated {
  CMatrix sum, carry;
  Compensated(Eigen::Index r, Eigen::Index c) : sum(CMatrix::Zero(r, c)), carry(CMatrix::Zero(r, c)) {}
  void add(const CMatrix& term) {
    const CMatrix y = term - carry;
    const CMatrix t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

MatrixSeries fourier_nodes(const WeylLineData& d, double l, int n, double limit, const CMatrix& slope,
                           double kappa) {
  const double dxi = d.xi(1) - d.xi(0);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < d.xi.size(); ++j) {
    if (std::abs(d.xi(j)) <= limit * (1.0 + 1e-12)) idx.push_back(j);
  }
  if (idx.size() < 3) throw TruncationError("inverse", "too few xi samples inside |xi| <= " + std::to_string(limit));
  std::vector<CMatrix> g(idx.size());
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const Eigen::Index j = idx[q];
    const cplx z(d.xi(j), d.eta);
    const double w = (q == 0 || q + 1 == idx.size()) ? 0.5 * dxi : dxi;
    g[q] = (w / (2.0 * kI * z)) * (d.phi[static_cast<std::size_t>(j)] - reference_transform(slope, kappa, z));
  }
  const double h = l / n;
  MatrixSeries out(static_cast<std::size_t>(n + 1));
  parallel_for(out.size(), [&](std::size_t k) {
    const double y = static_cast<double>(k) * h;
    Compensated acc(d.m2, d.m1);
    for (std::size_t q = 0; q < idx.size(); ++q) {
      acc.add(std::exp(cplx(0.0, -2.0 * y * d.xi(idx[q]))) * g[q]);
    }
    out[k] = (std::exp(2.0 * y * d.eta) / std::numbers::pi) * acc.sum + y * std::exp(-kappa * y) * slope;
  });
  out[0].setZero();
  return out;
}

double max_norm_of(const MatrixSeries& s) {
  double out = 0.0;
  for (const auto& m : s) out = std::max(out, op_norm(m));
  return out;
}

CMatrix upper_identity(int m1, int m) {
  CMatrix out = CMatrix::Zero(m1, m);
  out.leftCols(m1).setIdentity();
  return out;
}

// Central differences inside, second-order one-sided at the ends.
MatrixSeries differentiate(const MatrixSeries& f, double h) {
  const std::size_t n = f.size() - 1;
  MatrixSeries d(f.size());
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
  for (std::size_t k = 1; k < n; ++k) d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
  return d;
}

}  // namespace

WeylLineData synthesize_line_data(const PotentialGrid& grid, double eta, double a, double dxi,
                                  Continuation tail) {
  if (!(a > 0.0) || !(dxi > 0.0)) throw ValidationError("inverse", "a and dxi must be positive");
  if (!(eta > grid.norm_bound())) {
    throw DomainError("inverse", "eta = " + std::to_string(eta) + " must exceed the norm bound " +
                                     std::to_string(grid.norm_bound()));
  }
  const long half = std::max(1L, std::lround(a / dxi));
  WeylLineData d;
  d.m1 = grid.m1();
  d.m2 = grid.m2();
  d.eta = eta;
  d.a = a;
  d.norm_bound = grid.norm_bound();
  d.xi = RVector::LinSpaced(2 * half + 1, -a, a);
  d.phi.resize(static_cast<std::size_t>(2 * half + 1));
  parallel_for(d.phi.size(), [&](std::size_t j) {
    d.phi[j] = weyl_member(grid, cplx(d.xi(static_cast<Eigen::Index>(j)), eta), -1, tail);
  });
  return d;
}

WeylLineData read_line_data(const std::filesystem::path& path, double norm_bound) {
  const csv::Table t = csv::read(path);
  if (t.header.empty()) throw ValidationError("inverse", "line data CSV needs a header");
  int re_z = -1, im_z = -1;
  std::map<std::pair<int, int>, std::pair<int, int>> cols;  // (i,j) -> (re col, im col)
  const std::regex entry(R"((re|im)_phi_(\d+)_(\d+))");
  for (int c = 0; c < static_cast<int>(t.header.size()); ++c) {
    const std::string& name = t.header[static_cast<std::size_t>(c)];
    std::smatch m;
    if (name == "re_z") {
      re_z = c;
    } else if (name == "im_z") {
      im_z = c;
    } else if (std::regex_match(name, m, entry)) {
      const std::pair<int, int> key{std::stoi(m[2]), std::stoi(m[3])};
      auto it = cols.try_emplace(key, -1, -1).first;
      (m[1] == "re" ? it->second.first : it->second.second) = c;
    }
  }
  if (re_z < 0 || im_z < 0 || cols.empty()) {
    throw ValidationError("inverse", "line data CSV needs re_z, im_z and re/im_phi_i_j columns");
  }
  int m2 = 0, m1 = 0;
  for (const auto& [ij, rc] : cols) {
    m2 = std::max(m2, ij.first + 1);
    m1 = std::max(m1, ij.second + 1);
    if (rc.first < 0 || rc.second < 0) throw ValidationError("inverse", "phi entry missing re or im column");
  }
  if (static_cast<int>(cols.size()) != m1 * m2) throw ValidationError("inverse", "phi entries incomplete");
  if (t.rows.size() < 3) throw ValidationError("inverse", "line data needs >= 3 rows");

  std::vector<std::size_t> order(t.rows.size());
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return t.rows[x][static_cast<std::size_t>(re_z)] < t.rows[y][static_cast<std::size_t>(re_z)];
  });
  WeylLineData d;
  d.m1 = m1;
  d.m2 = m2;
  d.norm_bound = norm_bound;
  d.eta = t.rows[order[0]][static_cast<std::size_t>(im_z)];
  d.xi.resize(static_cast<Eigen::Index>(order.size()));
  for (std::size_t q = 0; q < order.size(); ++q) {
    const auto& row = t.rows[order[q]];
    if (std::abs(row[static_cast<std::size_t>(im_z)] - d.eta) > 1e-12 * (1.0 + std::abs(d.eta))) {
      throw ValidationError("inverse", "line data rows must share one Im z");
    }
    d.xi(static_cast<Eigen::Index>(q)) = row[static_cast<std::size_t>(re_z)];
    CMatrix p(m2, m1);
    for (const auto& [ij, rc] : cols) {
      p(ij.first, ij.second) = {row[static_cast<std::size_t>(rc.first)], row[static_cast<std::size_t>(rc.second)]};
    }
    d.phi.push_back(std::move(p));
  }
  d.a = std::max(std::abs(d.xi(0)), std::abs(d.xi(d.xi.size() - 1)));
  check_data(d);
  return d;
}

void write_line_data(const std::filesystem::path& path, const WeylLineData& d) {
  std::vector<std::string> header{"re_z", "im_z"};
  for (int i = 0; i < d.m2; ++i) {
    for (int j = 0; j < d.m1; ++j) {
      header.push_back("re_phi_" + std::to_string(i) + "_" + std::to_string(j));
      header.push_back("im_phi_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  std::vector<std::vector<double>> rows;
  for (Eigen::Index q = 0; q < d.xi.size(); ++q) {
    std::vector<double> row{d.xi(q), d.eta};
    const auto& p = d.phi[static_cast<std::size_t>(q)];
    for (int i = 0; i < d.m2; ++i) {
      for (int j = 0; j < d.m1; ++j) {
        row.push_back(p(i, j).real());
        row.push_back(p(i, j).imag());
      }
    }
    rows.push_back(std::move(row));
  }
  csv::write(path, header, rows);
}

Phi1Recovery recover_phi1_report(const WeylLineData& data, double l, int n, const FourierOptions& opts) {
  check_data(data);
  if (!(data.eta > data.norm_bound)) {
    throw DomainError("inverse", "eta = " + std::to_string(data.eta) + " must exceed the norm bound " +
                                     std::to_string(data.norm_bound));
  }
  if (!(l > 0.0) || n < 2) throw ValidationError("inverse", "need l > 0 and n >= 2");
  const double dxi = data.xi(1) - data.xi(0);
  if (dxi > std::numbers::pi / (2.0 * l) * (1.0 + 1e-12)) {
    throw ValidationError("inverse", "xi spacing " + std::to_string(dxi) + " exceeds pi/(2l) = " +
                                         std::to_string(std::numbers::pi / (2.0 * l)));
  }
  if (!(opts.kappa > 0.0)) throw ValidationError("inverse", "kappa must be positive");

  Phi1Recovery out;
  out.slope = CMatrix::Zero(data.m2, data.m1);
  if (opts.tail_subtraction) {
    // 2iz phi(z) -> Phi1'(0) at high energy; averaging both ends cancels the 1/z term.
    const std::size_t last = data.phi.size() - 1;
    const cplx z0(data.xi(0), data.eta);
    const cplx z1(data.xi(static_cast<Eigen::Index>(last)), data.eta);
    out.slope = 0.5 * (2.0 * kI * z0 * data.phi.front() + 2.0 * kI * z1 * data.phi.back());
  }
  const double a = std::max(std::abs(data.xi(0)), std::abs(data.xi(data.xi.size() - 1)));
  MatrixSeries full = fourier_nodes(data, l, n, a, out.slope, opts.kappa);
  const MatrixSeries half = fourier_nodes(data, l, n, 0.5 * a, out.slope, opts.kappa);
  double diff = 0.0;
  for (std::size_t k = 0; k < full.size(); ++k) diff = std::max(diff, op_norm(full[k] - half[k]));
  const double scale = max_norm_of(full);
  out.certificate = scale > 0.0 ? diff / scale : diff;
  if (out.certificate > opts.tol) {
    throw TruncationError("inverse", "Fourier recovery not converged: halving a changes Phi1 by " +
                                         std::to_string(out.certificate) + " (tol " +
                                         std::to_string(opts.tol) + "); increase a");
  }
  out.profile = make_profile(std::move(full), l / n);
  return out;
}

Phi1Profile recover_phi1(const WeylLineData& data, double l, int n, const FourierOptions& opts) {
  return recover_phi1_report(data, l, n, opts).profile;
}

CMatrix forward_transform(const Phi1Profile& profile, cplx z) {
  const double h = profile.h;
  const cplx p = -2.0 * kI * z * h;  // e^{2ixz} = e^{-p s} across a cell
  const cplx w1 = expint1(p);
  const cplx w0 = expint0(p) - w1;
  CMatrix acc = CMatrix::Zero(profile.m2(), profile.m1());
  for (int k = 0; k < profile.cells(); ++k) {
    const cplx phase = std::exp(2.0 * kI * z * (k * h));
    acc += (h * phase) * (w0 * profile.values[static_cast<std::size_t>(k)] +
                          w1 * profile.values[static_cast<std::size_t>(k + 1)]);
  }
  return 2.0 * kI * z * acc;
}

BetaRecovery recover_beta(const Phi1Profile& profile, const SKernel& s) {
  const int n = profile.cells();
  const int m1 = profile.m1();
  const int m2 = profile.m2();
  const int m = m1 + m2;
  const double h = profile.h;
  if (s.cells() != n || s.m2() != m2) throw ValidationError("inverse", "kernel does not match profile");
  BetaRecovery out;
  out.beta.resize(static_cast<std::size_t>(n + 1));
  const CMatrix top = upper_identity(m1, m);
  parallel_for(out.beta.size(), [&](std::size_t ku) {
    const int k = static_cast<int>(ku);
    if (k == 0) {
      out.beta[0] = top;
      return;
    }
    CMatrix rhs(static_cast<Eigen::Index>(k + 1) * m2, m1);
    for (int t = 0; t <= k; ++t) rhs.middleRows(t * m2, m2) = profile.derivative[static_cast<std::size_t>(t)];
    const CMatrix g = s.solve(k, rhs);
    CMatrix integral = CMatrix::Zero(m1, m);
    CMatrix row(m2, m);
    for (int t = 0; t <= k; ++t) {
      const double w = (t == 0 || t == k) ? 0.5 * h : h;
      row.leftCols(m1) = profile.values[static_cast<std::size_t>(t)];
      row.rightCols(m2).setIdentity();
      integral += w * (g.middleRows(t * m2, m2).adjoint() * row);
    }
    out.beta[ku] = top - integral;
  });
  for (const auto& b : out.beta) {
    out.defect = std::max(out.defect, op_norm(b * b.adjoint() - CMatrix::Identity(m1, m1)));
  }
  return out;
}

GammaRecovery complete_gamma(const MatrixSeries& beta, double h) {
  if (beta.size() < 3) throw ValidationError("inverse", "need at least 3 beta samples");
  if (!(h > 0.0)) throw ValidationError("inverse", "step must be positive");
  const int m1 = static_cast<int>(beta.front().rows());
  const int m = static_cast<int>(beta.front().cols());
  const int m2 = m - m1;
  if (m2 < 1) throw ValidationError("inverse", "beta must be m1 x m with m > m1");
  const std::size_t n = beta.size() - 1;

  // Nodewise orthonormal null-space bases, aligned to the previous node.
  MatrixSeries basis(beta.size());
  CMatrix prev = CMatrix::Zero(m2, m);
  prev.rightCols(m2).setIdentity();
  for (std::size_t k = 0; k <= n; ++k) {
    Eigen::JacobiSVD<CMatrix> svd(beta[k], Eigen::ComputeFullV);
    const double smin = svd.singularValues()(m1 - 1);
    if (smin < 0.5) {
      throw RankError("inverse", "null space of beta at node " + std::to_string(k) +
                                     " has dimension > m2 (sigma_min = " + std::to_string(smin) + ")");
    }
    const CMatrix rows = svd.matrixV().rightCols(m2).adjoint();  // m2 x m
    const CMatrix overlap = prev * rows.adjoint();
    Eigen::JacobiSVD<CMatrix> osvd(overlap);
    if (osvd.singularValues()(m2 - 1) < 0.5) {
      throw ContinuityError("inverse", "gamma basis jumps at node " + std::to_string(k) + " (grid too coarse?)");
    }
    basis[k] = polar_unitary(overlap) * rows;
    prev = basis[k];
  }

  // kappa' = -kappa C, C = gamma~' gamma~*, by RK4 with C at cell midpoints from
  // the centered difference quotient.
  const MatrixSeries d = differentiate(basis, h);
  MatrixSeries c(basis.size());
  for (std::size_t k = 0; k <= n; ++k) c[k] = d[k] * basis[k].adjoint();
  GammaRecovery out;
  out.gamma.resize(basis.size());
  CMatrix kappa = CMatrix::Identity(m2, m2);
  out.gamma[0] = basis[0];
  for (std::size_t k = 0; k < n; ++k) {
    const CMatrix mid = ((basis[k + 1] - basis[k]) / h) * (0.5 * (basis[k] + basis[k + 1])).adjoint();
    const CMatrix k1 = -kappa * c[k];
    const CMatrix k2 = -(kappa + 0.5 * h * k1) * mid;
    const CMatrix k3 = -(kappa + 0.5 * h * k2) * mid;
    const CMatrix k4 = -(kappa + h * k3) * c[k + 1];
    kappa += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    kappa = polar_unitary(kappa);  // C is skew-Hermitian, so kappa stays unitary
    out.gamma[k + 1] = kappa * basis[k + 1];
  }
  for (std::size_t k = 0; k <= n; ++k) {
    const auto& g = out.gamma[k];
    out.gamma_defect = std::max(out.gamma_defect, op_norm(g * g.adjoint() - CMatrix::Identity(m2, m2)));
    out.cross_defect = std::max(out.cross_defect, op_norm(beta[k] * g.adjoint()));
  }
  const MatrixSeries gd = differentiate(out.gamma, h);
  for (std::size_t k = 1; k < n; ++k) {
    out.derivative_defect = std::max(out.derivative_defect, op_norm(gd[k] * out.gamma[k].adjoint()));
  }
  return out;
}

RecoveredPotential recover_potential(const MatrixSeries& beta, const MatrixSeries& gamma, double h) {
  if (beta.size() != gamma.size() || beta.size() < 3) {
    throw ValidationError("inverse", "beta and gamma need the same >= 3 nodes");
  }
  RecoveredPotential out;
  out.h = h;
  out.beta = beta;
  out.gamma = gamma;
  const MatrixSeries d = differentiate(beta, h);
  out.v.resize(beta.size());
  for (std::size_t k = 0; k < beta.size(); ++k) out.v[k] = d[k] * gamma[k].adjoint();
  out.max_norm = max_norm_of(out.v);
  return out;
}

RecoveredPotential inverse_pipeline(const WeylLineData& data, double l, int n, const PipelineOptions& opts) {
  const Phi1Recovery phi = recover_phi1_report(data, l, n, opts.fourier);
  const SKernel s = s_kernel(phi.profile);
  const BetaRecovery beta = recover_beta(phi.profile, s);
  const GammaRecovery gamma = complete_gamma(beta.beta, phi.profile.h);
  RecoveredPotential out = recover_potential(beta.beta, gamma.gamma, phi.profile.h);
  out.beta_defect = beta.defect;
  out.gamma_defect = gamma.gamma_defect;
  out.cross_defect = gamma.cross_defect;
  out.derivative_defect = gamma.derivative_defect;
  out.fourier_certificate = phi.certificate;
  out.s_min_eigenvalue = opts.check_s_spectrum ? s.min_eigenvalue() : std::nan("");
  return out;
}

double relative_l2_error(const MatrixSeries& estimate, const MatrixSeries& truth, double lo, double hi) {
  if (estimate.size() != truth.size() || estimate.size() < 2) {
    throw ValidationError("inverse", "error norms need matching series");
  }
  const double n = static_cast<double>(estimate.size() - 1);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < estimate.size(); ++k) {
    const double frac = static_cast<double>(k) / n;
    if (frac < lo - 1e-12 || frac > hi + 1e-12) continue;
    num += (estimate[k] - truth[k]).squaredNorm();
    den += truth[k].squaredNorm();
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double max_error(const MatrixSeries& estimate, const MatrixSeries& truth, double lo, double hi) {
  if (estimate.size() != truth.size() || estimate.size() < 2) {
    throw ValidationError("inverse", "error norms need matching series");
  }
  const double n = static_cast<double>(estimate.size() - 1);
  double out = 0.0;
  for (std::size_t k = 0; k < estimate.size(); ++k) {
    const double frac = static_cast<double>(k) / n;
    if (frac < lo - 1e-12 || frac > hi + 1e-12) continue;
    out = std::max(out, op_norm(estimate[k] - truth[k]));
  }
  return out;
}

}  // namespace skewdirac
