#include "tailchain/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <type_traits>

#include <CLI11.hpp>
#include <json.hpp>

#include "tailchain/bounds.hpp"
#include "tailchain/error.hpp"
#include "tailchain/experiments.hpp"
#include "tailchain/exponents.hpp"
#include "tailchain/ft.hpp"
#include "tailchain/simulate.hpp"
#include "tailchain/spatial.hpp"

namespace tailchain {

namespace {

using nlohmann::json;
using Config = std::map<std::string, std::string>;

template <typename T>
struct is_vector : std::false_type {};
template <typename T>
struct is_vector<std::vector<T>> : std::true_type {};
template <typename T>
struct is_optional : std::false_type {};
template <typename T>
struct is_optional<std::optional<T>> : std::true_type {};

// Shortest text that parses back to the same double.
std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<std::string> render(double v) { return number(v); }
std::optional<std::string> render(const std::string& v) { return v; }
std::optional<std::string> render(bool v) { return v ? "true" : "false"; }
template <typename T>
  requires std::is_integral_v<T>
std::optional<std::string> render(T v) {
  return std::to_string(v);
}
template <typename T>
std::optional<std::string> render(const std::vector<T>& v) {
  if (v.empty()) return std::nullopt;
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + *render(v[i]);
  return s;
}
template <typename T>
std::optional<std::string> render(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  return render(*v);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// One subcommand plus the options that make up its recorded config.
class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& description)
      : name_(name), app_(app.add_subcommand(name, description)) {
    app_->add_option("--config", config_path_, "File of 'key = value' lines; explicit flags take precedence");
    app_->add_option("--save-config", save_path_, "Write the resolved config to this file");
  }

  const std::string& name() const noexcept { return name_; }
  CLI::App* app() const noexcept { return app_; }

  template <typename T>
  CLI::Option* option(const std::string& key, T& var, const std::string& help) {
    CLI::Option* o = app_->add_option("--" + key, var, help);
    if constexpr (is_vector<T>::value) o->delimiter(',');
    if constexpr (!is_optional<T>::value && !is_vector<T>::value) o->capture_default_str();
    entries_.emplace_back(key, [&var] { return render(var); });
    return o;
  }

  CLI::Option* flag(const std::string& key, bool& var, const std::string& help) {
    CLI::Option* o = app_->add_flag("--" + key, var, help);
    entries_.emplace_back(key, [&var] { return render(var); });
    return o;
  }

  /// Options that do not change results (destinations, worker counts).
  template <typename T>
  CLI::Option* local(const std::string& key, T& var, const std::string& help) {
    return app_->add_option("--" + key, var, help);
  }

  Config resolved() const {
    Config c;
    for (const auto& [key, get] : entries_) {
      if (auto v = get()) c[key] = *v;
    }
    return c;
  }

  bool records(const std::string& key) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
  }

  const std::string& config_path() const noexcept { return config_path_; }
  const std::string& save_path() const noexcept { return save_path_; }

 private:
  std::string name_;
  CLI::App* app_;
  std::string config_path_;
  std::string save_path_;
  std::vector<std::pair<std::string, std::function<std::optional<std::string>()>>> entries_;
};

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

// Appends --key=value for every config entry not given explicitly.
void merge_config(const Command& cmd, std::vector<std::string>& args, const std::string& path) {
  const std::string text = read_text(path);
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> extra;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!cmd.records(key)) {
      throw ArgumentError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "' for " + cmd.name());
    }
    const std::string flag = "--" + key;
    const bool explicit_flag = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!explicit_flag) extra.push_back(flag + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
}

std::string save_config_text(const Command& cmd, const Config& config) {
  std::string text = "# tailchain " + cmd.name() + "\n";
  for (const auto& [k, v] : config) text += k + " = " + v + "\n";
  return text;
}

json fit_json(const TailFitResult& f) {
  return {{"alpha_survival", f.alpha_survival}, {"alpha_density", f.alpha_density}, {"x_min", f.x_min},
          {"ks_distance", f.ks_distance},       {"n_tail", f.n_tail},               {"n_samples", f.n_samples},
          {"low_sample_warning", f.low_sample_warning}};
}

json error_json(const std::exception& e) { return {{"error", e.what()}}; }

FtOptions ft_options(std::size_t iterations, std::size_t restarts, double step, std::uint64_t seed,
                     unsigned threads) {
  FtOptions o;
  o.iterations = iterations;
  o.restarts = restarts;
  o.step = step;
  o.seed = Seed{seed};
  o.threads = threads;
  return o;
}

json gamma2_json(const FtEstimate& e, double rho) {
  return {{"gamma2", e.value}, {"weights", e.weights.values()}, {"method", to_string(e.method)}, {"n", e.weights.size()},
          {"rho", rho}};
}

std::vector<std::vector<std::size_t>> parse_blocks(const std::string& text, std::size_t dim) {
  std::vector<std::vector<std::size_t>> blocks;
  if (text.empty()) {
    blocks.emplace_back();
    for (std::size_t c = 0; c < dim; ++c) blocks.back().push_back(c);
    return blocks;
  }
  std::istringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<std::size_t> block;
    std::istringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) {
      const std::string t = trim(item);
      std::size_t c = 0;
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), c);
      if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ArgumentError("bad coordinate index '" + t + "' in --blocks");
      }
      block.push_back(c);
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::string curve_csv(const std::vector<double>& x, const std::vector<double>& y, const std::string& header) {
  std::string text = header + "\n";
  for (std::size_t i = 0; i < x.size(); ++i) text += number(x[i]) + "," + number(y[i]) + "\n";
  return text;
}

// Shared radius-grid flags.
struct GridFlags {
  double r_min = 1e-3;
  double r_max = 1.0;
  std::size_t points = 100;

  void attach(Command& c) {
    c.option("r-min", r_min, "Smallest grid radius");
    c.option("r-max", r_max, "Largest grid radius");
    c.option("points", points, "Number of log-spaced grid radii");
  }
  RadiusGrid grid(double rho) const { return RadiusGrid::log_spaced(r_min, r_max, points, rho); }
};

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trajectory geometry: FT functional, tail exponents, bounds and simulation studies", "tailchain"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;
  auto command = [&](const std::string& name, const std::string& description) -> Command& {
    commands.push_back(std::make_unique<Command>(app, name, description));
    return *commands.back();
  };

  std::string input, output;
  bool header = false;
  unsigned threads = 1;
  auto input_flags = [&](Command& c) {
    c.option("input", input, "Trajectory CSV, one iterate per row")->required();
    c.flag("header", header, "Skip one header row");
    c.local("output", output, "Write the JSON report here instead of stdout");
  };

  // simulate
  ProcessSpec sim;
  std::string sim_kind = "gaussian_walk";
  std::uint64_t seed = 0;
  Command& c_sim = command("simulate", "Simulate a built-in process and write its trajectory CSV");
  c_sim.option("process", sim_kind, "gaussian_walk | stable_levy_walk | beta_prime_walk | perturbed_gd_quadratic");
  c_sim.option("dim", sim.dim, "Dimension D");
  c_sim.option("steps", sim.steps, "Number of steps (the path has steps + 1 points)");
  c_sim.option("step", sim.step, "Step size (gaussian_walk, perturbed_gd_quadratic)");
  c_sim.option("noise", sim.noise, "Per-coordinate noise variances");
  c_sim.option("curvature", sim.curvature, "Per-coordinate curvatures (perturbed_gd_quadratic)");
  c_sim.option("initial", sim.initial, "Start point");
  c_sim.option("stable-alpha", sim.stable_alpha, "Stable index (stable_levy_walk)");
  c_sim.option("stable-scale", sim.stable_scale, "Stable scale (stable_levy_walk)");
  c_sim.option("bp-alpha", sim.bp_alpha, "Beta-prime shape alpha (beta_prime_walk)");
  c_sim.option("bp-beta", sim.bp_beta, "Beta-prime shape beta (beta_prime_walk)");
  c_sim.option("seed", seed, "Base seed");
  c_sim.local("output", output, "Trajectory CSV path (stdout if omitted); metadata goes to <output>.json");

  // gamma2
  std::optional<double> rho_opt, loss_bound, lipschitz;
  std::string normalization = "none";
  std::size_t iterations = 2000, restarts = 5;
  double step = 0.5;
  Command& c_g2 = command("gamma2", "Estimate the normalized FT functional of a trajectory");
  input_flags(c_g2);
  c_g2.option("rho", rho_opt, "Truncation radius (default B/L if both given, else 1)");
  c_g2.option("loss-bound", loss_bound, "Loss bound B, used for the default rho");
  c_g2.option("lipschitz", lipschitz, "Lipschitz constant L, used for the default rho");
  c_g2.option("normalize", normalization, "none | running | global");
  c_g2.option("iterations", iterations, "Subgradient iterations per restart");
  c_g2.option("restarts", restarts, "Number of restarts");
  c_g2.option("step-size", step, "Subgradient step scale");
  c_g2.option("seed", seed, "Base seed for the restarts");
  c_g2.local("threads", threads, "Worker cap (does not change results)");

  // tail-fit
  std::optional<double> x_min;
  std::size_t quantile_grid = 100;
  std::string tail_mode = "reciprocal";
  Command& c_tf = command("tail-fit", "Fit a power-law tail");
  input_flags(c_tf);
  c_tf.option("mode", tail_mode, "reciprocal: fit 1/|W_{k+1} - W_k|; values: fit the first column");
  c_tf.option("x-min", x_min, "Fixed cutoff (skips the KS search)");
  c_tf.option("quantile-grid", quantile_grid, "Number of candidate cutoffs");

  // stable-index
  std::size_t block_size = 10;
  std::string blocks_text;
  Command& c_si = command("stable-index", "Stable-index estimate from lag-1 increments");
  input_flags(c_si);
  c_si.option("block-size", block_size, "Summation block size K");
  c_si.option("blocks", blocks_text, "Coordinate blocks, e.g. '0,1;2' (default: one block of all coordinates)");

  // ballmass
  GridFlags grid_flags;
  std::vector<std::size_t> lags{1};
  double rho = 1.0;
  double window_lo = 0.01, window_hi = 0.2;
  std::size_t anchors = 0;
  std::string curve_path;
  Command& c_bm = command("ballmass", "Empirical ball-mass curve, exponent and kernel functional");
  input_flags(c_bm);
  grid_flags.attach(c_bm);
  c_bm.option("lags", lags, "Increment lags averaged into the kernel");
  c_bm.option("rho", rho, "Truncation radius for the kernel functional");
  c_bm.option("window-lo", window_lo, "Lower end of the mass window for the exponent fit");
  c_bm.option("window-hi", window_hi, "Upper end of the mass window for the exponent fit");
  c_bm.option("anchors", anchors, "Anchor blocks for sup mode (0 disables it)");
  c_bm.local("curve", curve_path, "Write the (r, mass) curve CSV here");

  // kfunction
  std::optional<double> fit_lo, fit_hi;
  Command& c_kf = command("kfunction", "Ripley-type K-function curve and its log-log slope");
  input_flags(c_kf);
  grid_flags.attach(c_kf);
  c_kf.option("fit-lo", fit_lo, "Smallest radius in the slope fit (default r-min)");
  c_kf.option("fit-hi", fit_hi, "Largest radius in the slope fit (default r-max)");
  c_kf.local("curve", curve_path, "Write the (r, K) curve CSV here");

  // cover
  Command& c_cv = command("cover", "Greedy covering numbers and the Dudley entropy integral");
  input_flags(c_cv);
  grid_flags.attach(c_cv);
  c_cv.option("rho", rho, "Upper limit of the entropy integral");
  c_cv.local("curve", curve_path, "Write the (r, N_r) curve CSV here");

  // bound
  BoundInputs bi;
  std::optional<double> tail_prob, cor_alpha, c_rho;
  Command& c_bd = command("bound", "Plug-in generalization bounds (up to universal constants)");
  c_bd.option("gamma2", bi.gamma2, "Normalized FT functional (or its expectation)");
  c_bd.option("loss-bound", bi.loss_bound, "Loss bound B");
  c_bd.option("lipschitz", bi.lipschitz, "Lipschitz constant L");
  c_bd.option("rho", bi.rho, "Truncation radius");
  c_bd.option("n", bi.n, "Sample count");
  c_bd.option("delta", bi.delta, "Failure probability");
  c_bd.option("mi-inf", bi.mutual_info_inf, "Mutual information term I_inf");
  c_bd.option("mi-1", bi.mutual_info_1, "Mutual information term I_1");
  c_bd.option("k1", bi.k1, "Universal constant K1");
  c_bd.option("k2", bi.k2, "Universal constant K2");
  c_bd.option("tail-prob", tail_prob, "P(sup R_n > B) for unbounded losses");
  c_bd.option("alpha", cor_alpha, "Lower tail exponent for the Ahlfors-regular bound");
  c_bd.option("c-rho", c_rho, "Ahlfors constant C_rho (needs --alpha)");
  c_bd.local("output", output, "Write the JSON report here instead of stdout");

  // study
  std::string study_name;
  std::optional<std::size_t> replicates, steps_opt, dim_opt, points_opt, block_opt;
  std::vector<double> study_grid;
  std::optional<double> study_rho, study_lo, study_hi;
  std::optional<std::string> study_norm;
  std::optional<std::size_t> study_iters, study_restarts;
  std::string out_dir = ".";
  bool timing = false;
  Command& c_st = command("study", "Run a simulation study and write its report");
  c_st.option("name", study_name, "figure1_ordering | appendix_c_curve | gaussian_dimension | exponent_comparison")
      ->required();
  c_st.option("replicates", replicates, "Replicates per grid point");
  c_st.option("seed", seed, "Base seed");
  c_st.option("grid", study_grid, "Grid values (meaning depends on the study)");
  c_st.option("steps", steps_opt, "Steps per simulated path");
  c_st.option("dim", dim_opt, "Dimension of simulated paths");
  c_st.option("rho", study_rho, "Truncation radius of the FT functional");
  c_st.option("normalize", study_norm, "running | global | none");
  c_st.option("iterations", study_iters, "FT subgradient iterations");
  c_st.option("restarts", study_restarts, "FT restarts");
  c_st.option("window-lo", study_lo, "Mass window lower end (gaussian_dimension)");
  c_st.option("window-hi", study_hi, "Mass window upper end (gaussian_dimension)");
  c_st.option("radius-points", points_opt, "Radius grid size (gaussian_dimension)");
  c_st.option("block-size", block_opt, "Stable-index block size (exponent_comparison)");
  c_st.local("out-dir", out_dir, "Report directory");
  c_st.local("threads", threads, "Worker cap (does not change results)");
  c_st.app()->add_flag("--timing", timing, "Record runtime_seconds (breaks byte-identical reruns)");

  // analyze
  std::size_t window = 200;
  double a_rho = 0.25;
  Command& c_an = command("analyze", "Bundle every estimator on the trailing iterates of a trajectory");
  input_flags(c_an);
  c_an.option("window", window, "Number of trailing iterates analyzed");
  c_an.option("rho", a_rho, "Truncation radius");
  c_an.option("normalize", normalization, "none | running | global (applied before the FT estimate)");
  c_an.option("iterations", iterations, "Subgradient iterations per restart");
  c_an.option("restarts", restarts, "Number of restarts");
  c_an.option("seed", seed, "Base seed");
  c_an.option("block-size", block_size, "Stable-index block size K");
  c_an.option("window-lo", window_lo, "Mass window lower end");
  c_an.option("window-hi", window_hi, "Mass window upper end");
  c_an.option("lags", lags, "Increment lags for the ball-mass curve");
  grid_flags.attach(c_an);
  c_an.local("threads", threads, "Worker cap (does not change results)");

  try {
    std::vector<std::string> args = raw_args;
    // The config file is merged before parsing so explicit flags win.
    if (!args.empty()) {
      for (const auto& cmd : commands) {
        if (cmd->name() != args.front()) continue;
        for (std::size_t i = 1; i < args.size(); ++i) {
          std::string path;
          if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
          if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
          if (!path.empty()) {
            merge_config(*cmd, args, path);
            break;
          }
        }
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage_error;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return exit_usage_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_data_error;
  }

  const Command* active = nullptr;
  for (const auto& cmd : commands) {
    if (cmd->app()->parsed()) active = cmd.get();
  }
  const Config config = active->resolved();
  const std::string& name = active->name();

  auto finish = [&](json doc, std::optional<std::uint64_t> used_seed) {
    doc["command"] = name;
    doc["config"] = config;
    doc["seed"] = used_seed ? json(*used_seed) : json(nullptr);
    const std::string text = doc.dump(2) + "\n";
    if (output.empty()) {
      out << text;
    } else {
      write_text(output, text);
    }
  };

  try {
    if (!active->save_path().empty()) write_text(active->save_path(), save_config_text(*active, config));

    if (name == "simulate") {
      sim.kind = parse_process_kind(sim_kind);
      sim.seed = Seed{seed};
      const Trajectory t = simulate(sim);
      if (output.empty()) {
        out << format_trajectory(t);
      } else {
        save_trajectory(t, output);
        json meta = {{"command", name}, {"config", config}, {"seed", seed}, {"points", t.size()}, {"dim", t.dim()}};
        write_text(output + ".json", meta.dump(2) + "\n");
      }
    } else if (name == "gamma2") {
      const Trajectory t = load_trajectory(input, header);
      const double r = rho_opt ? *rho_opt : default_rho(loss_bound, lipschitz);
      const auto how = parse_normalization(normalization);
      const auto est =
          estimate_gamma2(normalize(t, how), r, ft_options(iterations, restarts, step, seed, threads));
      json doc = gamma2_json(est, r);
      doc["normalization"] = to_string(how);
      finish(doc, seed);
    } else if (name == "tail-fit") {
      const Trajectory t = load_trajectory(input, header);
      PowerLawOptions po{x_min, quantile_grid};
      json doc;
      if (tail_mode == "reciprocal") {
        const auto r = lower_tail_exponent_reciprocal(t, po);
        doc = fit_json(r.fit);
        doc["zero_increments"] = r.zero_increments;
      } else if (tail_mode == "values") {
        std::vector<double> xs(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) xs[i] = t(i, 0);
        doc = fit_json(fit_power_law(xs, po));
      } else {
        throw ArgumentError("--mode must be 'reciprocal' or 'values'");
      }
      doc["mode"] = tail_mode;
      finish(doc, std::nullopt);
    } else if (name == "stable-index") {
      const Trajectory t = load_trajectory(input, header);
      const auto blocks = parse_blocks(blocks_text, t.dim());
      const auto r = layerwise_stable_index(t, blocks, block_size);
      finish({{"alpha_hat", r.alpha_hat},
              {"per_block", r.per_block},
              {"blocks", blocks},
              {"block_size", r.block_size},
              {"dropped_zeros", r.dropped_zeros}},
             std::nullopt);
    } else if (name == "ballmass") {
      const Trajectory t = load_trajectory(input, header);
      const auto radii = grid_flags.grid(rho);
      const auto curve = ball_mass_curve(t, lags, radii);
      json doc = {{"radii", radii.radii()}, {"masses", curve.masses}, {"lags", lags}, {"rho", rho}};
      try {
        const auto fit = fit_ball_mass_exponent(curve, {window_lo, window_hi});
        doc["exponent"] = {{"alpha", fit.alpha}, {"r_squared", fit.r_squared}, {"points", fit.points}};
      } catch (const Error& e) {
        doc["exponent"] = error_json(e);
      }
      try {
        const auto kf = kernel_functional(curve, rho, t.dim());
        doc["kernel_functional"] = {
            {"value", kf.value}, {"trimmed_zero_mass", kf.trimmed_zero_mass}, {"mode", "averaged"}};
      } catch (const Error& e) {
        doc["kernel_functional"] = error_json(e);
      }
      if (anchors > 0) {
        try {
          const auto kf = kernel_functional_sup(anchored_ball_mass_curves(t, lags, radii, anchors), rho, t.dim());
          doc["kernel_functional_sup"] = {
              {"value", kf.value}, {"trimmed_zero_mass", kf.trimmed_zero_mass}, {"anchors", anchors}};
        } catch (const Error& e) {
          doc["kernel_functional_sup"] = error_json(e);
        }
      }
      doc["constants_note"] = "kernel functional is stated up to the universal constant K";
      if (!curve_path.empty()) write_text(curve_path, curve_csv(radii.radii(), curve.masses, "r,mass"));
      finish(doc, std::nullopt);
    } else if (name == "kfunction") {
      const Trajectory t = load_trajectory(input, header);
      const auto radii = grid_flags.grid(grid_flags.r_max);
      const auto curve = k_function(t, radii);
      json doc = {{"radii", radii.radii()}, {"values", curve.values}, {"n", curve.n}, {"diameter", curve.diameter}};
      try {
        doc["slope"] = k_function_slope(curve, fit_lo.value_or(grid_flags.r_min), fit_hi.value_or(grid_flags.r_max));
      } catch (const Error& e) {
        doc["slope"] = error_json(e);
      }
      if (!curve_path.empty()) write_text(curve_path, curve_csv(radii.radii(), curve.values, "r,k"));
      finish(doc, std::nullopt);
    } else if (name == "cover") {
      const Trajectory t = load_trajectory(input, header);
      const auto radii = grid_flags.grid(rho);
      const auto prof = covering_numbers(t, radii);
      std::vector<double> counts(prof.counts.begin(), prof.counts.end());
      if (!curve_path.empty()) write_text(curve_path, curve_csv(radii.radii(), counts, "r,count"));
      finish({{"radii", radii.radii()},
              {"counts", prof.counts},
              {"dudley_value", prof.dudley_value},
              {"distinct_points", prof.distinct_points},
              {"rho", rho}},
             std::nullopt);
    } else if (name == "bound") {
      bi.unbounded_tail_probability = tail_prob;
      json doc = {{"l_rho", bi.l_rho()},
                  {"high_prob_bound", theorem1_high_prob_bound(bi)},
                  {"confidence", theorem1_confidence(bi)},
                  {"expectation_bound", theorem1_expectation_bound(bi)},
                  {"constants_note", "bounds are stated up to the universal constants K1, K2"}};
      if (c_rho && !cor_alpha) throw ArgumentError("--c-rho needs --alpha");
      if (cor_alpha) doc["ahlfors_gamma2_bound"] = corollary1_bound(*cor_alpha, bi.rho, c_rho.value_or(1.0 / bi.rho));
      finish(doc, std::nullopt);
    } else if (name == "study") {
      StudySpec spec = default_study_spec(parse_study_kind(study_name));
      spec.seed = Seed{seed};
      spec.threads = threads;
      if (replicates) spec.replicates = *replicates;
      if (!study_grid.empty()) spec.grid = study_grid;
      if (steps_opt) spec.steps = *steps_opt;
      if (dim_opt) spec.dim = *dim_opt;
      if (study_rho) spec.rho = *study_rho;
      if (study_norm) spec.normalization = parse_normalization(*study_norm);
      if (study_iters) spec.ft_iterations = *study_iters;
      if (study_restarts) spec.ft_restarts = *study_restarts;
      if (study_lo) spec.window.lo = *study_lo;
      if (study_hi) spec.window.hi = *study_hi;
      if (points_opt) spec.radius_points = *points_opt;
      if (block_opt) spec.block_size = *block_opt;
      const auto result = run_study(spec);
      const auto files = emit_report(result, out_dir, config, timing);
      std::vector<std::string> names;
      for (const auto& f : files) names.push_back(f.filename().string());
      finish({{"study", study_name}, {"files", names}, {"verdicts", result.verdicts}}, seed);
    } else if (name == "analyze") {
      const Trajectory full = load_trajectory(input, header);
      const Trajectory t = full.tail(window);
      json doc = {{"n_total", full.size()},
                  {"n_used", t.size()},
                  {"window", window},
                  {"rho", a_rho},
                  {"block_size", block_size},
                  {"mass_window", {window_lo, window_hi}},
                  {"lags", lags}};
      try {
        const auto how = parse_normalization(normalization);
        doc["gamma2"] = gamma2_json(
            estimate_gamma2(normalize(t, how), a_rho, ft_options(iterations, restarts, step, seed, threads)), a_rho);
      } catch (const Error& e) {
        doc["gamma2"] = error_json(e);
      }
      try {
        const auto r = lower_tail_exponent_reciprocal(t);
        doc["reciprocal_tail_fit"] = fit_json(r.fit);
        doc["reciprocal_tail_fit"]["zero_increments"] = r.zero_increments;
      } catch (const Error& e) {
        doc["reciprocal_tail_fit"] = error_json(e);
      }
      try {
        const auto radii = grid_flags.grid(grid_flags.r_max);
        const auto fit = fit_ball_mass_exponent(ball_mass_curve(t, lags, radii), {window_lo, window_hi});
        doc["ball_mass_exponent"] = {{"alpha", fit.alpha}, {"r_squared", fit.r_squared}, {"points", fit.points}};
      } catch (const Error& e) {
        doc["ball_mass_exponent"] = error_json(e);
      }
      try {
        std::vector<std::size_t> all(t.dim());
        for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
        const auto r = layerwise_stable_index(t, {all}, block_size);
        doc["stable_index"] = {{"alpha_hat", r.alpha_hat}, {"dropped_zeros", r.dropped_zeros}};
      } catch (const Error& e) {
        doc["stable_index"] = error_json(e);
      }
      try {
        const auto radii = grid_flags.grid(grid_flags.r_max);
        doc["k_function_slope"] = k_function_slope(k_function(t, radii), grid_flags.r_min, a_rho);
      } catch (const Error& e) {
        doc["k_function_slope"] = error_json(e);
      }
      finish(doc, seed);
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_data_error;
  }
  return exit_ok;
}

}  // namespace tailchain
