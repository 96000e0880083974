#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tailchain {

/// Ordered sequence of iterates W_0..W_m in R^D, stored row-major.
/// Immutable after construction; all entries finite, at least one point.
class Trajectory {
 public:
  Trajectory(std::vector<double> flat, std::size_t dim);
  explicit Trajectory(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> point(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  double operator()(std::size_t i, std::size_t c) const noexcept { return data_[i * dim_ + c]; }
  std::span<const double> flat() const noexcept { return data_; }

  /// Last `count` points (the whole trajectory if it is shorter).
  Trajectory tail(std::size_t count) const;
  /// Copy with every coordinate multiplied by `factor`.
  Trajectory scaled(double factor) const;

  bool operator==(const Trajectory&) const = default;

 private:
  std::vector<double> data_;
  std::size_t dim_;
};

double distance(std::span<const double> a, std::span<const double> b) noexcept;
double norm(std::span<const double> v) noexcept;

/// Lag-k differences W_{j+k} - W_j, j = 0..size-k-1.
struct IncrementSeries {
  std::vector<double> deltas;  // row-major, size() rows of dim
  std::size_t dim = 1;
  std::size_t lag = 1;

  std::size_t size() const noexcept { return deltas.size() / dim; }
  std::span<const double> delta(std::size_t j) const noexcept {
    return {deltas.data() + j * dim, dim};
  }
  std::vector<double> norms() const;
};

IncrementSeries increments(const Trajectory& t, std::size_t lag);

/// Probability vector over trajectory points.
class SimplexWeights {
 public:
  explicit SimplexWeights(std::vector<double> weights);
  static SimplexWeights uniform(std::size_t n);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const noexcept { return w_[i]; }
  const std::vector<double>& values() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

/// Strictly increasing positive radii plus the truncation radius rho.
class RadiusGrid {
 public:
  RadiusGrid(std::vector<double> radii, double rho);
  static RadiusGrid log_spaced(double lo, double hi, std::size_t count, double rho);
  static RadiusGrid linear(double lo, double hi, std::size_t count, double rho);

  const std::vector<double>& radii() const noexcept { return radii_; }
  std::size_t size() const noexcept { return radii_.size(); }
  double operator[](std::size_t i) const noexcept { return radii_[i]; }
  double rho() const noexcept { return rho_; }

 private:
  std::vector<double> radii_;
  double rho_;
};

Trajectory load_trajectory(const std::filesystem::path& path, bool has_header = false);
Trajectory parse_trajectory(const std::string& text, bool has_header = false);
void save_trajectory(const Trajectory& t, const std::filesystem::path& path);
std::string format_trajectory(const Trajectory& t);

enum class StdConvention { population, sample };

const char* to_string(StdConvention c) noexcept;

struct NormalizedTrajectory {
  Trajectory points;
  /// First index at which every coordinate's running std is positive.
  /// Points before it are emitted unscaled. Equals size() when degenerate.
  std::size_t first_scaled = 0;
  bool degenerate = false;
  StdConvention convention = StdConvention::population;
};

/// Divides point k coordinate-wise by the running standard deviation of
/// points 0..k.
NormalizedTrajectory normalize_by_running_std(const Trajectory& t,
                                              StdConvention convention = StdConvention::population);

}  // namespace tailchain
