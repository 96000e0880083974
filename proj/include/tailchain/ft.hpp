#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tailchain/random.hpp"
#include "tailchain/trajectory.hpp"

namespace tailchain {

/// Pairwise distances under d_rho(x, y) = min{rho, |x - y|}, with every row
/// also kept in ascending order (ties ordered by point index).
class TruncatedGram {
 public:
  TruncatedGram(const Trajectory& w, double rho);

  std::size_t size() const noexcept { return n_; }
  double rho() const noexcept { return rho_; }
  double entry(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
  double sorted(std::size_t i, std::size_t j) const noexcept { return sorted_[i * n_ + j]; }
  std::uint32_t order(std::size_t i, std::size_t j) const noexcept { return order_[i * n_ + j]; }
  /// Number of leading sorted positions of row i whose distance is below
  /// rho; segments past it have zero length.
  std::size_t active(std::size_t i) const noexcept { return active_[i]; }

  /// Unnormalized chaining integral of row i:
  ///   sum_j (sorted_{j+1} - sorted_j) * sqrt(|log sum_{k<=j} p_{order_k}|).
  double row_integral(std::size_t i, const std::vector<double>& p) const;

 private:
  std::size_t n_;
  double rho_;
  std::vector<double> entries_;
  std::vector<double> sorted_;
  std::vector<std::uint32_t> order_;
  std::vector<std::size_t> active_;
};

enum class FtMethod { subgradient, uniform, oracle };
const char* to_string(FtMethod m) noexcept;

struct FtEstimate {
  double value = 0.0;
  SimplexWeights weights = SimplexWeights::uniform(1);
  std::vector<double> objective_trace;
  FtMethod method = FtMethod::subgradient;
};

struct FtOptions {
  std::size_t iterations = 2000;
  std::size_t restarts = 5;
  double step = 0.5;
  Seed seed{0};
  unsigned threads = 1;
};

/// (1/rho) max_i row_integral(i, p): the normalized chaining functional of
/// the atomic measure p.
double ft_objective(const TruncatedGram& g, const SimplexWeights& p);

/// Minimizes ft_objective over the simplex through p = softmax(z) with a
/// normalized subgradient method; returns the better of the optimum found
/// and the uniform measure.
FtEstimate estimate_gamma2(const Trajectory& w, double rho, const FtOptions& opts = {});
FtEstimate estimate_gamma2(const TruncatedGram& g, const FtOptions& opts = {});

/// Exhaustive minimum over simplex points whose coordinates are multiples of
/// 1/grid_resolution. Refuses more than 6 points.
FtEstimate brute_force_gamma2(const Trajectory& w, double rho, std::size_t grid_resolution);

/// rho = B / L when both are supplied, otherwise 1.
double default_rho(std::optional<double> loss_bound, std::optional<double> lipschitz);

}  // namespace tailchain
