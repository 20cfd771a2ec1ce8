#pragma once

#include "skewdirac/linalg.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace skewdirac {

/// Block signature of the system: j = diag(I_m1, -I_m2) and the
/// off-diagonal self-adjoint V = [[0, v], [v*, 0]] built from an m1 x m2 block.
struct Signature {
  int m1 = 1;
  int m2 = 1;

  int m() const { return m1 + m2; }
  CMatrix j() const;
  CMatrix assemble_v(const CMatrix& v) const;
  /// i z j + j V, the coefficient of the Dirac system.
  CMatrix coefficient(cplx z, const CMatrix& v) const;

  CMatrix top_rows(const CMatrix& a) const { return a.topRows(m1); }
  CMatrix bottom_rows(const CMatrix& a) const { return a.bottomRows(m2); }
};

/// m1 x m2 potential v sampled on the uniform grid x_k = k l / n, k = 0..n.
///
/// Besides the node samples the grid keeps one value per cell (the midpoint
/// value), which is what the cell propagators use. Building from a callable
/// samples the midpoints exactly, so cell-wise constant potentials with jumps
/// at nodes are represented without error. Building from node samples only
/// uses the average of the two endpoint samples.
class PotentialGrid {
 public:
  PotentialGrid(int m1, int m2, double length, MatrixSeries nodes, MatrixSeries cells,
                std::optional<double> norm_bound = std::nullopt);

  static PotentialGrid from_function(int m1, int m2, double length, int n,
                                     const std::function<CMatrix(double)>& v,
                                     std::optional<double> norm_bound = std::nullopt);
  static PotentialGrid from_nodes(int m1, int m2, double length, MatrixSeries nodes,
                                  std::optional<double> norm_bound = std::nullopt);
  static PotentialGrid zero(int m1, int m2, double length, int n);
  static PotentialGrid constant(double length, int n, const CMatrix& value,
                                std::optional<double> norm_bound = std::nullopt);

  const Signature& signature() const { return sig_; }
  int m1() const { return sig_.m1; }
  int m2() const { return sig_.m2; }
  int m() const { return sig_.m(); }
  int cells() const { return static_cast<int>(cells_.size()); }
  double length() const { return length_; }
  double step() const { return length_ / cells(); }
  double x(int k) const { return k * step(); }
  double norm_bound() const { return norm_bound_; }

  const CMatrix& node(int k) const { return nodes_.at(static_cast<std::size_t>(k)); }
  const CMatrix& cell(int k) const { return cells_.at(static_cast<std::size_t>(k)); }
  const MatrixSeries& nodes() const { return nodes_; }

  /// Largest operator norm over node and cell samples.
  double max_norm() const;

  /// The same potential restricted to [0, x_k].
  PotentialGrid truncated(int k) const;

 private:
  Signature sig_;
  double length_;
  MatrixSeries nodes_;
  MatrixSeries cells_;
  double norm_bound_ = 0.0;
};

/// Parse a JSON descriptor
///   {"m1":1,"m2":1,"l":1.0,"n":400,"kind":"zero"|"constant"|"csv",
///    "value": ..., "path": "...", "norm_bound": M}
/// `value` is a number (times the rectangular identity), a [re, im] pair, or
/// an m1 x m2 nested array of numbers / [re, im] pairs. Relative CSV paths
/// are resolved against `base_dir`.
PotentialGrid potential_from_json(const std::string& text,
                                  const std::filesystem::path& base_dir = {});
PotentialGrid load_potential(const std::filesystem::path& descriptor);

/// CSV with one row per node: Re v_ij, Im v_ij in row-major (i, j) order.
MatrixSeries read_potential_csv(const std::filesystem::path& path, int m1, int m2);
void write_potential_csv(const std::filesystem::path& path, const MatrixSeries& samples);

/// Rectangular m1 x m2 matrix with ones on the main diagonal.
CMatrix rectangular_identity(int m1, int m2);

}  // namespace skewdirac
