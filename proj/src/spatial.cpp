#include "tailchain/spatial.hpp"

#include <algorithm>
#include <cmath>

#include "tailchain/error.hpp"
#include "tailchain/stats.hpp"

namespace tailchain {

KFunctionCurve k_function(const Trajectory& w, const RadiusGrid& radii) {
  const std::size_t n = w.size();
  std::vector<double> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back(distance(w.point(i), w.point(j)));
  }
  std::sort(pairs.begin(), pairs.end());
  const double diameter = pairs.empty() ? 0.0 : pairs.back();
  KFunctionCurve curve{radii, std::vector<double>(radii.size(), 0.0), n, diameter};
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const auto within = std::upper_bound(pairs.begin(), pairs.end(), radii[k]) - pairs.begin();
    // Each unordered pair counts twice in the i != j sum.
    curve.values[k] = diameter / static_cast<double>(n) * 2.0 * static_cast<double>(within);
  }
  return curve;
}

double k_function_slope(const KFunctionCurve& curve, double r_lo, double r_hi) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < curve.radii.size(); ++k) {
    const double r = curve.radii[k];
    if (r >= r_lo && r <= r_hi && curve.values[k] > 0.0) {
      x.push_back(std::log(r));
      y.push_back(std::log(curve.values[k]));
    }
  }
  if (x.size() < 2) throw InsufficientDataError("K-function slope needs at least two positive grid values");
  return stats::least_squares(x, y).slope;
}

std::vector<double> farthest_point_radii(const Trajectory& w) {
  const std::size_t n = w.size();
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = distance(w.point(i), w.point(0));
  std::vector<double> radii;
  radii.reserve(n);
  while (true) {
    const auto far = std::max_element(nearest.begin(), nearest.end());
    radii.push_back(*far);
    if (*far == 0.0) break;
    const std::size_t c = static_cast<std::size_t>(far - nearest.begin());
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], distance(w.point(i), w.point(c)));
  }
  return radii;
}

CoveringProfile covering_numbers(const Trajectory& w, const RadiusGrid& radii) {
  const auto cover = farthest_point_radii(w);
  // cover is nonincreasing and ends at 0 after `distinct` centers.
  const std::size_t distinct = cover.size();
  auto count_at = [&](double r) -> std::size_t {
    std::size_t k = 0;
    while (cover[k] > r) ++k;
    return k + 1;
  };
  CoveringProfile out{radii, {}, 0.0, distinct};
  out.counts.reserve(radii.size());
  for (double r : radii.radii()) out.counts.push_back(count_at(r));

  // Trapezoid over {0} U {radii <= rho} U {rho}; at r -> 0+ the count is the
  // number of distinct points.
  const double rho = radii.rho();
  std::vector<double> xs{0.0};
  std::vector<double> fs{std::sqrt(std::log(static_cast<double>(distinct)))};
  for (std::size_t k = 0; k < radii.size() && radii[k] < rho; ++k) {
    xs.push_back(radii[k]);
    fs.push_back(std::sqrt(std::log(static_cast<double>(out.counts[k]))));
  }
  xs.push_back(rho);
  fs.push_back(std::sqrt(std::log(static_cast<double>(count_at(rho)))));
  double integral = 0.0;
  for (std::size_t k = 1; k < xs.size(); ++k) integral += 0.5 * (xs[k] - xs[k - 1]) * (fs[k] + fs[k - 1]);
  out.dudley_value = integral / rho;
  return out;
}

}  // namespace tailchain
