#include "skewdirac/borg_marchenko.hpp"

#include "skewdirac/errors.hpp"
#include "skewdirac/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace skewdirac {

BMReport borg_marchenko_from_differences(double ray_c, const std::vector<double>& heights,
                                         const std::vector<double>& difference,
                                         const std::vector<double>& r_grid) {
  if (heights.size() < 3) throw ValidationError("inverse", "Borg-Marchenko check needs >= 3 heights");
  if (difference.size() != heights.size()) throw ValidationError("inverse", "one difference per height");
  for (std::size_t k = 0; k < heights.size(); ++k) {
    if (!(heights[k] > 0.0) || (k > 0 && !(heights[k] > heights[k - 1]))) {
      throw ValidationError("inverse", "heights must be positive and increasing");
    }
  }
  BMReport rep;
  rep.ray_c = ray_c;
  rep.heights = heights;
  rep.difference = difference;
  const std::size_t n = heights.size();
  const std::size_t third = std::max<std::size_t>(1, n / 3);
  for (double r : r_grid) {
    BMRow row;
    row.r = r;
    for (std::size_t k = 0; k < n; ++k) {
      // Work in logs so that e^{2rh} cannot overflow before the product is formed.
      const double d = difference[k];
      row.statistic.push_back(d > 0.0 ? std::exp(std::log(d) + 2.0 * r * heights[k]) : 0.0);
    }
    row.sup = *std::max_element(row.statistic.begin(), row.statistic.end());
    const double first = *std::max_element(row.statistic.begin(), row.statistic.begin() + third);
    const double last = *std::max_element(row.statistic.end() - third, row.statistic.end());
    row.agreeing = last <= 1.5 * first;
    const double t0 = row.statistic.front();
    const double t1 = row.statistic.back();
    if (t0 > 0.0 && t1 > 0.0) {
      row.growth_per_doubling =
          std::exp(std::log(t1 / t0) * std::log(2.0) / std::log(heights.back() / heights.front()));
    } else {
      row.growth_per_doubling = (t0 == 0.0 && t1 == 0.0) ? 1.0 : std::nan("");
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

BMReport borg_marchenko_check(const WeylEvaluator& phi_a, const WeylEvaluator& phi_b, double ray_c,
                              const std::vector<double>& r_grid, const std::vector<double>& heights) {
  std::vector<double> diff(heights.size());
  parallel_for(heights.size(), [&](std::size_t k) {
    const cplx z(ray_c * heights[k], heights[k]);
    diff[k] = op_norm(phi_a(z) - phi_b(z));
  });
  return borg_marchenko_from_differences(ray_c, heights, diff, r_grid);
}

}  // namespace skewdirac
