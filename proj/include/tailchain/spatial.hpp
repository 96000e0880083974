#pragma once

#include <cstddef>
#include <vector>

#include "tailchain/trajectory.hpp"

namespace tailchain {

/// K(r) = diam(W) / n * #{(i, j) : i != j, |w_i - w_j| <= r}.
/// The diam(W)/n prefactor follows the trajectory-clustering variant of
/// Ripley's estimator, not the classical area/n^2 normalization.
struct KFunctionCurve {
  RadiusGrid radii;
  std::vector<double> values;
  std::size_t n = 0;
  double diameter = 0.0;
};

KFunctionCurve k_function(const Trajectory& w, const RadiusGrid& radii);

/// Log-log slope of K over the grid points with K > 0 and r in [r_lo, r_hi].
double k_function_slope(const KFunctionCurve& curve, double r_lo, double r_hi);

/// Greedy farthest-point cover sizes. counts[j] is the number of
/// farthest-point centers needed before every point lies within radii[j] of
/// one; it upper-bounds the true covering number N_r and is at most
/// N_{r/2}.
struct CoveringProfile {
  RadiusGrid radii;
  std::vector<std::size_t> counts;
  double dudley_value = 0.0;  // (1/rho) int_0^rho sqrt(log N_r) dr, trapezoidal
  std::size_t distinct_points = 0;
};

CoveringProfile covering_numbers(const Trajectory& w, const RadiusGrid& radii);

/// Insertion radii of the farthest-point traversal starting from point 0:
/// entry k is the covering radius of the first k + 1 centers.
std::vector<double> farthest_point_radii(const Trajectory& w);

}  // namespace tailchain
