#include "tailchain/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "tailchain/error.hpp"
#include "tailchain/ft.hpp"
#include "tailchain/parallel.hpp"
#include "tailchain/simulate.hpp"
#include "tailchain/stats.hpp"

namespace tailchain {

const char* to_string(StudyKind k) noexcept {
  switch (k) {
    case StudyKind::figure1_ordering: return "figure1_ordering";
    case StudyKind::appendix_c_curve: return "appendix_c_curve";
    case StudyKind::gaussian_dimension: return "gaussian_dimension";
    case StudyKind::exponent_comparison: return "exponent_comparison";
  }
  return "unknown";
}

StudyKind parse_study_kind(std::string_view name) {
  for (auto k : {StudyKind::figure1_ordering, StudyKind::appendix_c_curve, StudyKind::gaussian_dimension,
                 StudyKind::exponent_comparison}) {
    if (name == to_string(k)) return k;
  }
  throw ArgumentError("unknown study '" + std::string(name) + "'");
}

const char* to_string(Normalization n) noexcept {
  switch (n) {
    case Normalization::running: return "running";
    case Normalization::global: return "global";
    case Normalization::none: return "none";
  }
  return "unknown";
}

Normalization parse_normalization(std::string_view name) {
  for (auto n : {Normalization::running, Normalization::global, Normalization::none}) {
    if (name == to_string(n)) return n;
  }
  throw ArgumentError("unknown normalization '" + std::string(name) + "'");
}

Trajectory normalize(const Trajectory& t, Normalization how, StdConvention convention) {
  switch (how) {
    case Normalization::none: return t;
    case Normalization::running: return normalize_by_running_std(t, convention).points;
    case Normalization::global: break;
  }
  const std::size_t n = t.size();
  const std::size_t d = t.dim();
  if (n < 2) throw ArgumentError("normalization needs at least two points");
  std::vector<double> scale(d, 1.0);
  std::vector<double> column(n);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < n; ++i) column[i] = t(i, c);
    const double m = stats::mean(column);
    for (double& v : column) v = (v - m) * (v - m);
    const double denom = convention == StdConvention::population ? static_cast<double>(n) : static_cast<double>(n - 1);
    const double sd = std::sqrt(stats::pairwise_sum(column) / denom);
    if (sd > 0.0) scale[c] = sd;  // zero-variance coordinates stay unscaled
  }
  std::vector<double> flat(t.flat().begin(), t.flat().end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) flat[i * d + c] /= scale[c];
  }
  return Trajectory(std::move(flat), d);
}

StudySpec default_study_spec(StudyKind kind) {
  StudySpec s;
  s.study = kind;
  switch (kind) {
    case StudyKind::figure1_ordering:
      s.grid = {1.5, 2.0};
      break;
    case StudyKind::appendix_c_curve:
      s.grid = RadiusGrid::log_spaced(1e-2, 1.0, 10, 1.0).radii();
      s.steps = 100;
      s.rho = 0.25;
      s.normalization = Normalization::running;
      break;
    case StudyKind::gaussian_dimension:
      s.grid = {1.0, 2.0, 3.0};
      s.replicates = 20;
      s.steps = 10000;
      s.normalization = Normalization::none;
      break;
    case StudyKind::exponent_comparison:
      s.grid = {1.0, 1.25, 1.5, 1.75, 2.0};
      s.replicates = 20;
      s.normalization = Normalization::none;
      break;
  }
  return s;
}

void validate(const StudySpec& s) {
  if (s.replicates == 0) throw ArgumentError("replicates must be at least 1");
  if (s.grid.empty()) throw ArgumentError("study grid must be nonempty");
  for (std::size_t k = 1; k < s.grid.size(); ++k) {
    if (!(s.grid[k] > s.grid[k - 1])) throw ArgumentError("study grid must be strictly increasing");
  }
  if (s.steps < 1) throw ArgumentError("steps must be at least 1");
  if (s.dim < 1) throw ArgumentError("dimension must be at least 1");
  if (!(s.rho > 0.0)) throw ArgumentError("rho must be positive");
  if (s.ft_iterations < 1 || s.ft_restarts < 1) throw ArgumentError("FT iterations and restarts must be positive");
  if (!(s.window.lo > 0.0 && s.window.hi > s.window.lo && s.window.hi < 1.0)) {
    throw ArgumentError("mass window must satisfy 0 < lo < hi < 1");
  }
  if (s.radius_points < 2) throw ArgumentError("radius grid needs at least two points");
  for (double g : s.grid) {
    switch (s.study) {
      case StudyKind::figure1_ordering:
      case StudyKind::exponent_comparison:
        if (!(g > 0.0 && g <= 2.0)) throw ArgumentError("stable index grid values must lie in (0, 2]");
        break;
      case StudyKind::appendix_c_curve:
        if (!(g > 0.0)) throw ArgumentError("beta-prime shapes must be positive");
        break;
      case StudyKind::gaussian_dimension:
        if (!(g >= 1.0 && g == std::floor(g))) throw ArgumentError("dimension grid values must be positive integers");
        break;
    }
  }
}

namespace {

using CellStats = std::map<std::string, double>;

double ft_value(const Trajectory& path, const StudySpec& s, Seed seed) {
  FtOptions opts;
  opts.iterations = s.ft_iterations;
  opts.restarts = s.ft_restarts;
  opts.seed = seed;
  return estimate_gamma2(normalize(path, s.normalization), s.rho, opts).value;
}

CellStats run_cell(const StudySpec& s, double g, Seed cell) {
  ProcessSpec p;
  p.steps = s.steps;
  p.dim = s.dim;
  p.seed = cell.derive(0);
  switch (s.study) {
    case StudyKind::figure1_ordering: {
      if (g >= 2.0) {
        p.kind = ProcessKind::gaussian_walk;
      } else {
        p.kind = ProcessKind::stable_levy_walk;
        p.stable_alpha = g;
      }
      return {{"gamma2", ft_value(simulate(p), s, cell.derive(1))}};
    }
    case StudyKind::appendix_c_curve: {
      p.kind = ProcessKind::beta_prime_walk;
      p.dim = 2;
      p.bp_alpha = g;
      p.bp_beta = s.bp_beta;
      return {{"gamma2", ft_value(simulate(p), s, cell.derive(1))}};
    }
    case StudyKind::gaussian_dimension: {
      p.kind = ProcessKind::gaussian_walk;
      p.dim = static_cast<std::size_t>(g);
      const Trajectory path = simulate(p);
      const std::size_t lag = 1;
      const auto radii = RadiusGrid::log_spaced(1e-4, 10.0, s.radius_points, 10.0);
      const auto fit = fit_ball_mass_exponent(ball_mass_curve(path, {&lag, 1}, radii), s.window);
      return {{"alpha_hat", fit.alpha}, {"r_squared", fit.r_squared}};
    }
    case StudyKind::exponent_comparison: {
      p.kind = ProcessKind::stable_levy_walk;
      p.stable_alpha = g;
      const Trajectory path = simulate(p);
      std::vector<std::size_t> all(path.dim());
      for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
      return {{"lower_tail_alpha", lower_tail_exponent_reciprocal(path).fit.alpha_survival},
              {"stable_index", layerwise_stable_index(path, {all}, s.block_size).alpha_hat}};
    }
  }
  throw ArgumentError("unknown study");
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) return false;
  }
  return true;
}

void add_verdicts(StudyResult& r) {
  const auto& grid = r.spec.grid;
  switch (r.spec.study) {
    case StudyKind::figure1_ordering: {
      const auto& g = r.stats.at("gamma2");
      bool disjoint = true;
      for (std::size_t k = 1; k < grid.size(); ++k) disjoint = disjoint && g.hi95[k - 1] < g.lo95[k];
      r.verdicts["means_increase_with_tail_index"] = strictly_increasing(g.mean);
      r.verdicts["intervals_disjoint"] = disjoint;
      break;
    }
    case StudyKind::appendix_c_curve: {
      const auto& g = r.stats.at("gamma2");
      r.verdicts["means_strictly_increasing"] = strictly_increasing(g.mean);
      if (grid.size() >= 2) {
        r.diagnostics["spearman_alpha_vs_mean"] = stats::spearman(grid, g.mean);
        std::vector<double> log_a, sqrt_a;
        for (double a : grid) {
          log_a.push_back(std::log(a));
          sqrt_a.push_back(std::sqrt(a));
        }
        const auto log_fit = stats::least_squares(log_a, g.mean);
        r.diagnostics["log_shape_slope"] = log_fit.slope;
        r.diagnostics["log_shape_r_squared"] = log_fit.r_squared;
        r.diagnostics["sqrt_shape_r_squared"] = stats::least_squares(sqrt_a, g.mean).r_squared;
      }
      break;
    }
    case StudyKind::gaussian_dimension: {
      const auto& a = r.stats.at("alpha_hat");
      bool within = true;
      for (std::size_t k = 0; k < grid.size(); ++k) within = within && std::abs(a.mean[k] - grid[k]) <= 0.25;
      r.verdicts["alpha_within_0.25_of_dimension"] = within;
      break;
    }
    case StudyKind::exponent_comparison: {
      if (grid.size() >= 2) {
        const auto& lower = r.stats.at("lower_tail_alpha").mean;
        const auto& stable = r.stats.at("stable_index").mean;
        r.diagnostics["spearman_grid_vs_stable_index"] = stats::spearman(grid, stable);
        r.diagnostics["spearman_grid_vs_lower_tail"] = stats::spearman(grid, lower);
        r.diagnostics["spearman_lower_tail_vs_stable_index"] = stats::spearman(lower, stable);
      }
      break;
    }
  }
}

}  // namespace

StudyResult run_study(const StudySpec& spec) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t grid = spec.grid.size();
  const std::size_t reps = spec.replicates;
  std::vector<CellStats> cells(grid * reps);
  parallel_for(cells.size(), spec.threads, [&](std::size_t i) {
    const std::size_t g = i / reps;
    const std::size_t r = i % reps;
    cells[i] = run_cell(spec, spec.grid[g], spec.seed.derive(g).derive(r));
  });

  StudyResult out;
  out.spec = spec;
  for (const auto& [name, value] : cells.front()) {
    (void)value;
    StatSeries series;
    series.raw.assign(grid, std::vector<double>(reps));
    for (std::size_t g = 0; g < grid; ++g) {
      for (std::size_t r = 0; r < reps; ++r) series.raw[g][r] = cells[g * reps + r].at(name);
      const auto ci = stats::mean_ci95(series.raw[g]);
      series.mean.push_back(ci.mean);
      series.lo95.push_back(ci.lo);
      series.hi95.push_back(ci.hi);
    }
    out.stats.emplace(name, std::move(series));
  }
  switch (spec.study) {
    case StudyKind::gaussian_dimension: out.primary_stat = "alpha_hat"; break;
    case StudyKind::exponent_comparison: out.primary_stat = "lower_tail_alpha"; break;
    default: out.primary_stat = "gamma2"; break;
  }
  add_verdicts(out);
  out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

nlohmann::json spec_json(const StudySpec& s) {
  return {{"study", to_string(s.study)},
          {"replicates", s.replicates},
          {"seed", s.seed.base},
          {"grid", s.grid},
          {"steps", s.steps},
          {"dim", s.dim},
          {"rho", s.rho},
          {"normalization", to_string(s.normalization)},
          {"std_convention", "population"},
          {"bp_beta", s.bp_beta},
          {"ft_iterations", s.ft_iterations},
          {"ft_restarts", s.ft_restarts},
          {"mass_window", {s.window.lo, s.window.hi}},
          {"radius_points", s.radius_points},
          {"block_size", s.block_size}};
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::string curve_csv(const std::vector<double>& grid, const StatSeries& s) {
  std::string text = "grid,mean,lo95,hi95\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    text += format_number(grid[k]) + ',' + format_number(s.mean[k]) + ',' + format_number(s.lo95[k]) + ',' +
            format_number(s.hi95[k]) + '\n';
  }
  return text;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const StudyResult& result, const std::filesystem::path& out_dir,
                                               const std::map<std::string, std::string>& config,
                                               bool include_runtime) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  nlohmann::json stats = nlohmann::json::object();
  for (const auto& [name, s] : result.stats) {
    stats[name] = {{"mean", s.mean}, {"lo95", s.lo95}, {"hi95", s.hi95}, {"raw", s.raw}};
  }
  nlohmann::json doc = {{"study", to_string(result.spec.study)},
                        {"spec", spec_json(result.spec)},
                        {"grid", result.spec.grid},
                        {"stats", stats},
                        {"primary_stat", result.primary_stat},
                        {"verdicts", result.verdicts},
                        {"diagnostics", result.diagnostics},
                        {"seed", result.spec.seed.base},
                        {"runtime_seconds", include_runtime ? nlohmann::json(result.runtime_seconds) : nullptr}};
  if (!config.empty()) doc["config"] = config;

  const std::string stem = to_string(result.spec.study);
  std::vector<std::filesystem::path> written;
  written.push_back(out_dir / (stem + ".json"));
  write_file(written.back(), doc.dump(2) + '\n');
  for (const auto& [name, s] : result.stats) {
    const std::string file = name == result.primary_stat ? stem + ".csv" : stem + "_" + name + ".csv";
    written.push_back(out_dir / file);
    write_file(written.back(), curve_csv(result.spec.grid, s));
  }
  return written;
}

}  // namespace tailchain
