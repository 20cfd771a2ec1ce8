#include "skewdirac/potential.hpp"

#include "skewdirac/csv.hpp"
#include "skewdirac/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace skewdirac {

CMatrix Signature::j() const {
  CMatrix out = CMatrix::Zero(m(), m());
  out.topLeftCorner(m1, m1).setIdentity();
  out.bottomRightCorner(m2, m2) = -CMatrix::Identity(m2, m2);
  return out;
}

CMatrix Signature::assemble_v(const CMatrix& v) const {
  CMatrix out = CMatrix::Zero(m(), m());
  out.topRightCorner(m1, m2) = v;
  out.bottomLeftCorner(m2, m1) = v.adjoint();
  return out;
}

CMatrix Signature::coefficient(cplx z, const CMatrix& v) const {
  // i z j + j V: diagonal blocks +-iz, off-diagonal v and -v*.
  CMatrix out = CMatrix::Zero(m(), m());
  out.topLeftCorner(m1, m1).diagonal().setConstant(kI * z);
  out.bottomRightCorner(m2, m2).diagonal().setConstant(-kI * z);
  out.topRightCorner(m1, m2) = v;
  out.bottomLeftCorner(m2, m1) = -v.adjoint();
  return out;
}

CMatrix rectangular_identity(int m1, int m2) { return CMatrix::Identity(m1, m2); }

PotentialGrid::PotentialGrid(int m1, int m2, double length, MatrixSeries nodes,
                             MatrixSeries cells, std::optional<double> norm_bound)
    : sig_{m1, m2}, length_(length), nodes_(std::move(nodes)), cells_(std::move(cells)) {
  if (m1 < 1 || m2 < 1) throw ValidationError("dirac-core", "m1 and m2 must be positive");
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ValidationError("dirac-core", "interval length must be positive and finite");
  }
  if (cells_.size() < 2) throw ValidationError("dirac-core", "need at least 2 grid cells");
  if (nodes_.size() != cells_.size() + 1) {
    throw ValidationError("dirac-core", "expected n+1 node samples for n cells");
  }
  auto check = [&](const CMatrix& s, std::size_t k, const char* what) {
    if (s.rows() != m1 || s.cols() != m2) {
      throw ValidationError("dirac-core", std::string(what) + " " + std::to_string(k) +
                                              " has wrong shape");
    }
    if (!all_finite(s, std::numeric_limits<double>::max())) {
      throw ValidationError("dirac-core", std::string(what) + " " + std::to_string(k) +
                                              " is not finite");
    }
  };
  for (std::size_t k = 0; k < nodes_.size(); ++k) check(nodes_[k], k, "node sample");
  for (std::size_t k = 0; k < cells_.size(); ++k) check(cells_[k], k, "cell sample");

  const double observed = max_norm();
  if (norm_bound) {
    if (!(*norm_bound >= 0.0)) throw ValidationError("dirac-core", "norm bound must be >= 0");
    if (*norm_bound < observed * (1.0 - 1e-12)) {
      throw ValidationError("dirac-core", "norm bound " + std::to_string(*norm_bound) +
                                              " is below max |v| = " + std::to_string(observed));
    }
    norm_bound_ = std::max(*norm_bound, observed);
  } else {
    norm_bound_ = observed;
  }
}

PotentialGrid PotentialGrid::from_function(int m1, int m2, double length, int n,
                                           const std::function<CMatrix(double)>& v,
                                           std::optional<double> norm_bound) {
  if (n < 2) throw ValidationError("dirac-core", "need at least 2 grid cells");
  const double h = length / n;
  MatrixSeries nodes, cells;
  nodes.reserve(n + 1);
  cells.reserve(n);
  for (int k = 0; k <= n; ++k) nodes.push_back(v(k * h));
  for (int k = 0; k < n; ++k) cells.push_back(v((k + 0.5) * h));
  return PotentialGrid(m1, m2, length, std::move(nodes), std::move(cells), norm_bound);
}

PotentialGrid PotentialGrid::from_nodes(int m1, int m2, double length, MatrixSeries nodes,
                                        std::optional<double> norm_bound) {
  if (nodes.size() < 3) throw ValidationError("dirac-core", "need at least 3 node samples");
  MatrixSeries cells;
  cells.reserve(nodes.size() - 1);
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) cells.push_back(0.5 * (nodes[k] + nodes[k + 1]));
  return PotentialGrid(m1, m2, length, std::move(nodes), std::move(cells), norm_bound);
}

PotentialGrid PotentialGrid::zero(int m1, int m2, double length, int n) {
  return from_function(m1, m2, length, n, [=](double) { return CMatrix::Zero(m1, m2).eval(); }, 0.0);
}

PotentialGrid PotentialGrid::constant(double length, int n, const CMatrix& value,
                                      std::optional<double> norm_bound) {
  const int m1 = static_cast<int>(value.rows());
  const int m2 = static_cast<int>(value.cols());
  return from_function(m1, m2, length, n, [&](double) { return value; }, norm_bound);
}

double PotentialGrid::max_norm() const {
  double out = 0.0;
  for (const auto& s : nodes_) out = std::max(out, op_norm(s));
  for (const auto& s : cells_) out = std::max(out, op_norm(s));
  return out;
}

PotentialGrid PotentialGrid::truncated(int k) const {
  if (k < 2 || k > cells()) throw ValidationError("dirac-core", "truncation index out of range");
  MatrixSeries nodes(nodes_.begin(), nodes_.begin() + k + 1);
  MatrixSeries cells(cells_.begin(), cells_.begin() + k);
  return PotentialGrid(m1(), m2(), x(k), std::move(nodes), std::move(cells), norm_bound_);
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

cplx parse_scalar(const json& value) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  throw ValidationError("dirac-core", "expected a number or a [re, im] pair");
}

CMatrix parse_value(const json& value, int m1, int m2) {
  // Matrix form is always nested, so a flat array can only be a [re, im] scalar.
  if (value.is_number() || (value.is_array() && !value.empty() && value[0].is_number())) {
    return parse_scalar(value) * rectangular_identity(m1, m2);
  }
  if (!value.is_array() || static_cast<int>(value.size()) != m1) {
    throw ValidationError("dirac-core", "constant value must be a scalar or an m1 x m2 array");
  }
  CMatrix out(m1, m2);
  for (int i = 0; i < m1; ++i) {
    const json& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != m2) {
      throw ValidationError("dirac-core", "constant value row " + std::to_string(i) + " has wrong length");
    }
    for (int j = 0; j < m2; ++j) out(i, j) = parse_scalar(row[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace

PotentialGrid potential_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("dirac-core", std::string("bad potential descriptor: ") + e.what());
  }
  auto required_int = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_integer()) {
      throw ValidationError("dirac-core", std::string("descriptor needs integer field '") + key + "'");
    }
    return doc[key].get<int>();
  };
  const int m1 = required_int("m1");
  const int m2 = required_int("m2");
  const int n = required_int("n");
  if (!doc.contains("l") || !doc["l"].is_number()) {
    throw ValidationError("dirac-core", "descriptor needs numeric field 'l'");
  }
  const double l = doc["l"].get<double>();
  if (m1 < 1 || m2 < 1) throw ValidationError("dirac-core", "m1 and m2 must be positive");
  if (n < 2) throw ValidationError("dirac-core", "n must be at least 2");
  std::optional<double> bound;
  if (doc.contains("norm_bound")) {
    if (!doc["norm_bound"].is_number()) throw ValidationError("dirac-core", "norm_bound must be numeric");
    bound = doc["norm_bound"].get<double>();
  }
  const std::string kind = doc.value("kind", std::string{});
  if (kind == "zero") {
    auto grid = PotentialGrid::zero(m1, m2, l, n);
    if (bound) return PotentialGrid(m1, m2, l, grid.nodes(), MatrixSeries(n, CMatrix::Zero(m1, m2)), bound);
    return grid;
  }
  if (kind == "constant") {
    if (!doc.contains("value")) throw ValidationError("dirac-core", "constant potential needs 'value'");
    return PotentialGrid::constant(l, n, parse_value(doc["value"], m1, m2), bound);
  }
  if (kind == "csv") {
    if (!doc.contains("path") || !doc["path"].is_string()) {
      throw ValidationError("dirac-core", "csv potential needs 'path'");
    }
    std::filesystem::path p = doc["path"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    MatrixSeries nodes = read_potential_csv(p, m1, m2);
    if (static_cast<int>(nodes.size()) != n + 1) {
      throw ValidationError("dirac-core", "csv has " + std::to_string(nodes.size()) +
                                              " rows, expected n+1 = " + std::to_string(n + 1));
    }
    return PotentialGrid::from_nodes(m1, m2, l, std::move(nodes), bound);
  }
  throw ValidationError("dirac-core", "unknown potential kind '" + kind + "'");
}

PotentialGrid load_potential(const std::filesystem::path& descriptor) {
  std::ifstream in(descriptor, std::ios::binary);
  if (!in) throw ValidationError("dirac-core", "cannot open " + descriptor.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return potential_from_json(ss.str(), descriptor.parent_path());
}

MatrixSeries read_potential_csv(const std::filesystem::path& path, int m1, int m2) {
  const csv::Table table = csv::read(path);
  const std::size_t expected = static_cast<std::size_t>(2 * m1 * m2);
  MatrixSeries out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != expected) {
      throw ValidationError("dirac-core", "potential csv row " + std::to_string(r) + " has " +
                                              std::to_string(row.size()) + " columns, expected " +
                                              std::to_string(expected));
    }
    CMatrix v(m1, m2);
    for (int i = 0; i < m1; ++i) {
      for (int j = 0; j < m2; ++j) {
        const std::size_t c = static_cast<std::size_t>(2 * (i * m2 + j));
        v(i, j) = {row[c], row[c + 1]};
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

void write_potential_csv(const std::filesystem::path& path, const MatrixSeries& samples) {
  if (samples.empty()) throw ValidationError("dirac-core", "no samples to write");
  const Eigen::Index m1 = samples.front().rows();
  const Eigen::Index m2 = samples.front().cols();
  std::vector<std::string> header;
  for (Eigen::Index i = 0; i < m1; ++i) {
    for (Eigen::Index j = 0; j < m2; ++j) {
      header.push_back("re_v_" + std::to_string(i) + "_" + std::to_string(j));
      header.push_back("im_v_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  std::vector<std::vector<double>> rows;
  for (const auto& s : samples) {
    std::vector<double> row;
    for (Eigen::Index i = 0; i < m1; ++i) {
      for (Eigen::Index j = 0; j < m2; ++j) {
        row.push_back(s(i, j).real());
        row.push_back(s(i, j).imag());
      }
    }
    rows.push_back(std::move(row));
  }
  csv::write(path, header, rows);
}

}  // namespace skewdirac
