#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tailchain/trajectory.hpp"

namespace tailchain {

/// Continuous power-law fit of the upper tail x >= x_min.
struct TailFitResult {
  double alpha_survival = 0.0;  // P(X >= x) ~ x^-alpha_survival
  double alpha_density = 0.0;   // alpha_survival + 1
  double x_min = 0.0;
  double ks_distance = 0.0;
  std::size_t n_tail = 0;
  std::size_t n_samples = 0;
  bool low_sample_warning = false;  // fewer than 50 samples
};

struct PowerLawOptions {
  std::optional<double> x_min;     // skip the search and use this cutoff
  std::size_t quantile_grid = 100;  // candidate cutoffs
};

/// MLE alpha_density = 1 + n_tail / sum ln(x / x_min), with x_min picked
/// from a quantile grid to minimize the KS distance to the fitted Pareto.
TailFitResult fit_power_law(std::span<const double> samples, const PowerLawOptions& opts = {});

struct ReciprocalTailFit {
  TailFitResult fit;
  std::size_t zero_increments = 0;
};

/// Power-law fit of 1 / |W_{k+1} - W_k|. fit.alpha_survival is the lower
/// tail exponent: P(|dW| <= r) ~ r^a  <=>  P(1/|dW| >= y) ~ y^-a.
ReciprocalTailFit lower_tail_exponent_reciprocal(const Trajectory& t, const PowerLawOptions& opts = {});

/// Empirical ball masses of the lag-averaged kernel: masses[j] is the mean
/// over lags k of the fraction of lag-k increments with norm <= radii[j].
struct BallMassCurve {
  RadiusGrid radii;
  std::vector<double> masses;
  std::vector<std::size_t> lags;
};

BallMassCurve ball_mass_curve(const Trajectory& t, std::span<const std::size_t> lags, const RadiusGrid& radii);

/// One curve per contiguous block of start indices ("anchors"). Used to
/// approximate the supremum over starting points.
std::vector<BallMassCurve> anchored_ball_mass_curves(const Trajectory& t, std::span<const std::size_t> lags,
                                                     const RadiusGrid& radii, std::size_t anchors);

struct MassWindow {
  double lo = 0.01;
  double hi = 0.2;
};

struct BallMassExponent {
  double alpha = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log mass against log r over grid points whose
/// mass lies in the window (and strictly inside (0, 1)).
BallMassExponent fit_ball_mass_exponent(const BallMassCurve& curve, MassWindow window = {});
double exponent_from_ball_mass(const BallMassCurve& curve, MassWindow window = {});

/// Log-moment block estimator of the alpha-stable index.
struct StableIndexResult {
  double alpha_hat = 0.0;
  std::vector<double> per_block;
  std::size_t block_size = 0;
  std::size_t dropped_zeros = 0;
};

/// 1/alpha = (mean log|Y_j| - mean log|X_i|) / log K, Y_j sums of K
/// consecutive samples; clipped to (0, 2].
StableIndexResult stable_index(std::span<const double> samples, std::size_t block_size);

/// stable_index per coordinate block of the lag-1 increments, then the
/// median across blocks. `blocks` must partition {0, ..., D-1}.
StableIndexResult layerwise_stable_index(const Trajectory& t, const std::vector<std::vector<std::size_t>>& blocks,
                                         std::size_t block_size);

}  // namespace tailchain
