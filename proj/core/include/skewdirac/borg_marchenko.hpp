#pragma once

#include "skewdirac/linalg.hpp"

#include <functional>
#include <vector>

namespace skewdirac {

using WeylEvaluator = std::function<CMatrix(cplx)>;

struct BMRow {
  double r = 0.0;
  std::vector<double> statistic;  // ||phi_a - phi_b|| e^{2 r Im z} per height
  double sup = 0.0;
  double growth_per_doubling = 0.0;
  bool agreeing = false;
};

struct BMReport {
  double ray_c = 0.0;
  std::vector<double> heights;
  std::vector<double> difference;  // ||phi_a - phi_b|| per height
  std::vector<BMRow> rows;
};

/// Evaluates both Weyl functions on z = (c + i) h for each height h and, for each r,
/// the statistic ||phi_a - phi_b|| e^{2 r h}. An r "agrees" when the maximum over the
/// last third of the heights is at most 1.5 times the maximum over the first third.
/// Growth per doubling is (T_last / T_first)^{ln 2 / ln(h_last / h_first)}.
BMReport borg_marchenko_check(const WeylEvaluator& phi_a, const WeylEvaluator& phi_b, double ray_c,
                              const std::vector<double>& r_grid, const std::vector<double>& heights);

/// The same report for precomputed differences (used to test the statistic itself).
BMReport borg_marchenko_from_differences(double ray_c, const std::vector<double>& heights,
                                         const std::vector<double>& difference,
                                         const std::vector<double>& r_grid);

}  // namespace skewdirac
