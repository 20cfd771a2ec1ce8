#pragma once

#include "skewdirac/linalg.hpp"
#include "skewdirac/potential.hpp"

namespace skewdirac {

/// exp(h (i z j + j V_k)) for cell k, the exact propagator across the cell for
/// the midpoint value of v.
CMatrix cell_factor(const PotentialGrid& grid, int cell, cplx z);

/// Fundamental solution u(x_k, z), k = 0..last, of y' = (izj + jV) y, u(0) = I.
///
/// Node values are products of cell factors and are computed once on
/// construction. Entries above 1e300 raise OverflowError naming the cell.
class Propagator {
 public:
  Propagator(const PotentialGrid& grid, cplx z, int last = -1);

  cplx z() const { return z_; }
  int last() const { return static_cast<int>(u_.size()) - 1; }
  const CMatrix& u(int k) const { return u_.at(static_cast<std::size_t>(k)); }
  const MatrixSeries& nodes() const { return u_; }

 private:
  cplx z_;
  MatrixSeries u_;
};

CMatrix propagate(const PotentialGrid& grid, int x_index, cplx z);

/// The Gram matrix u(x,z)* j u(x,z).
CMatrix weyl_gram(const PotentialGrid& grid, int x_index, cplx z);
CMatrix gram_from(const Signature& sig, const CMatrix& u);

/// beta = [I 0] u(x,0), gamma = [0 I] u(x,0) at every node.
struct BoundaryRows {
  MatrixSeries beta;
  MatrixSeries gamma;

  /// max over nodes of ||beta beta* - I||, ||gamma gamma* - I||, ||beta gamma*||.
  double orthogonality_defect() const;
};

BoundaryRows boundary_rows(const PotentialGrid& grid);

}  // namespace skewdirac
