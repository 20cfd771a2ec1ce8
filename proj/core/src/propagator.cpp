#include "skewdirac/propagator.hpp"

#include "skewdirac/errors.hpp"

#include <algorithm>
#include <cmath>

namespace skewdirac {

CMatrix cell_factor(const PotentialGrid& grid, int cell, cplx z) {
  return expm(grid.step() * grid.signature().coefficient(z, grid.cell(cell)));
}

Propagator::Propagator(const PotentialGrid& grid, cplx z, int last) : z_(z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw ValidationError("dirac-core", "z must be finite");
  }
  if (last < 0) last = grid.cells();
  if (last > grid.cells()) throw ValidationError("dirac-core", "x index beyond the grid");
  u_.reserve(static_cast<std::size_t>(last) + 1);
  u_.push_back(CMatrix::Identity(grid.m(), grid.m()));
  for (int k = 0; k < last; ++k) {
    CMatrix next = cell_factor(grid, k, z) * u_.back();
    if (!all_finite(next)) {
      throw OverflowError("dirac-core", "fundamental solution overflows in cell " + std::to_string(k) +
                                            " (Im z * x too large)",
                          k);
    }
    u_.push_back(std::move(next));
  }
}

CMatrix propagate(const PotentialGrid& grid, int x_index, cplx z) {
  if (x_index < 0 || x_index > grid.cells()) throw ValidationError("dirac-core", "x index out of range");
  return Propagator(grid, z, x_index).u(x_index);
}

CMatrix gram_from(const Signature& sig, const CMatrix& u) {
  // u* j u without forming j: top rows count positively, bottom rows negatively.
  const auto top = u.topRows(sig.m1);
  const auto bottom = u.bottomRows(sig.m2);
  return hermitian_part(top.adjoint() * top - bottom.adjoint() * bottom);
}

CMatrix weyl_gram(const PotentialGrid& grid, int x_index, cplx z) {
  return gram_from(grid.signature(), propagate(grid, x_index, z));
}

double BoundaryRows::orthogonality_defect() const {
  double out = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    const auto& b = beta[k];
    const auto& g = gamma[k];
    out = std::max(out, op_norm(b * b.adjoint() - CMatrix::Identity(b.rows(), b.rows())));
    out = std::max(out, op_norm(g * g.adjoint() - CMatrix::Identity(g.rows(), g.rows())));
    out = std::max(out, op_norm(b * g.adjoint()));
  }
  return out;
}

BoundaryRows boundary_rows(const PotentialGrid& grid) {
  const Propagator p(grid, 0.0);
  BoundaryRows rows;
  rows.beta.reserve(p.nodes().size());
  rows.gamma.reserve(p.nodes().size());
  for (const auto& u : p.nodes()) {
    rows.beta.push_back(u.topRows(grid.m1()));
    rows.gamma.push_back(u.bottomRows(grid.m2()));
  }
  return rows;
}

}  // namespace skewdirac
