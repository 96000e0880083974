#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tailchain::stats {

/// Pairwise (cascade) summation in index order; result depends only on the
/// values and their order.
double pairwise_sum(std::span<const double> values) noexcept;
double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double stddev(std::span<const double> values);
double median(std::vector<double> values);

struct Interval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
/// Normal-approximation 95% interval for the mean.
Interval mean_ci95(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Average ranks (ties share the mean rank), 1-based.
std::vector<double> ranks(std::span<const double> values);
double spearman(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace tailchain::stats
