#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailchain/exponents.hpp"
#include "tailchain/random.hpp"
#include "tailchain/trajectory.hpp"

namespace tailchain {

enum class StudyKind { figure1_ordering, appendix_c_curve, gaussian_dimension, exponent_comparison };

const char* to_string(StudyKind k) noexcept;
StudyKind parse_study_kind(std::string_view name);

/// How a simulated path is rescaled before the FT functional is taken.
/// running: point k divided by the std of points 0..k (coordinate-wise).
/// global: every point divided by the whole-path coordinate-wise std.
enum class Normalization { running, global, none };

const char* to_string(Normalization n) noexcept;
Normalization parse_normalization(std::string_view name);

Trajectory normalize(const Trajectory& t, Normalization how, StdConvention convention = StdConvention::population);

/// Grid meaning per study:
///   figure1_ordering     stable index of the walk; 2 selects the Gaussian walk
///   appendix_c_curve     beta-prime shape alpha
///   gaussian_dimension   ambient dimension D
///   exponent_comparison  stable index of the walk
struct StudySpec {
  StudyKind study = StudyKind::figure1_ordering;
  std::size_t replicates = 100;
  Seed seed{0};
  std::vector<double> grid;

  std::size_t steps = 1000;
  std::size_t dim = 2;  // ignored by gaussian_dimension, fixed at 2 for appendix_c_curve
  double rho = 1.0;
  Normalization normalization = Normalization::global;
  double bp_beta = 3.5;
  std::size_t ft_iterations = 2000;
  std::size_t ft_restarts = 5;

  MassWindow window{0.001, 0.05};
  std::size_t radius_points = 300;
  std::size_t block_size = 10;

  unsigned threads = 1;  // never affects results
};

/// Study defaults; the grid is filled in.
StudySpec default_study_spec(StudyKind kind);
void validate(const StudySpec& spec);

struct StatSeries {
  std::vector<double> mean, lo95, hi95;
  std::vector<std::vector<double>> raw;  // [grid][replicate]
};

struct StudyResult {
  StudySpec spec;
  std::map<std::string, StatSeries> stats;
  std::string primary_stat;
  std::map<std::string, bool> verdicts;
  std::map<std::string, double> diagnostics;
  double runtime_seconds = 0.0;
};

StudyResult run_study(const StudySpec& spec);

/// Writes <study>.json and <study>.csv (primary statistic) plus
/// <study>_<stat>.csv for every other statistic. runtime_seconds is written
/// only when include_runtime is set so that repeated runs are byte-identical.
/// `config` is embedded verbatim when nonempty. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const StudyResult& result, const std::filesystem::path& out_dir,
                                               const std::map<std::string, std::string>& config = {},
                                               bool include_runtime = false);

}  // namespace tailchain
