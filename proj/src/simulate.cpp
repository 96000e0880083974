#include "tailchain/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tailchain/error.hpp"

namespace tailchain {

const char* to_string(ProcessKind k) noexcept {
  switch (k) {
    case ProcessKind::gaussian_walk:
      return "gaussian_walk";
    case ProcessKind::stable_levy_walk:
      return "stable_levy_walk";
    case ProcessKind::beta_prime_walk:
      return "beta_prime_walk";
    case ProcessKind::perturbed_gd_quadratic:
      return "perturbed_gd_quadratic";
  }
  return "unknown";
}

ProcessKind parse_process_kind(std::string_view name) {
  for (auto k : {ProcessKind::gaussian_walk, ProcessKind::stable_levy_walk, ProcessKind::beta_prime_walk,
                 ProcessKind::perturbed_gd_quadratic}) {
    if (name == to_string(k)) return k;
  }
  throw ArgumentError("unknown process kind '" + std::string(name) + "'");
}

namespace {

void check_vector(const std::vector<double>& v, std::size_t dim, const char* what, bool positive) {
  if (v.empty()) return;
  if (v.size() != dim) throw ArgumentError(std::string(what) + " must have one entry per dimension");
  for (double x : v) {
    if (!std::isfinite(x) || (positive && !(x >= 0.0))) throw ArgumentError(std::string(what) + " entries are invalid");
  }
}

}  // namespace

void validate(const ProcessSpec& spec) {
  if (spec.dim < 1) throw ArgumentError("process dimension must be at least 1");
  if (spec.steps < 1) throw ArgumentError("process needs at least one step");
  check_vector(spec.noise, spec.dim, "noise variance", true);
  check_vector(spec.curvature, spec.dim, "curvature", false);
  check_vector(spec.initial, spec.dim, "initial point", false);
  switch (spec.kind) {
    case ProcessKind::gaussian_walk:
    case ProcessKind::perturbed_gd_quadratic:
      if (!(spec.step > 0.0) || !std::isfinite(spec.step)) throw ArgumentError("step size must be positive");
      break;
    case ProcessKind::stable_levy_walk:
      if (!(spec.stable_alpha > 0.0 && spec.stable_alpha <= 2.0)) throw ArgumentError("stable index must lie in (0, 2]");
      if (!(spec.stable_scale > 0.0)) throw ArgumentError("stable scale must be positive");
      break;
    case ProcessKind::beta_prime_walk:
      if (spec.dim != 2) throw ArgumentError("beta_prime_walk is defined in two dimensions only");
      if (!(spec.bp_alpha > 0.0) || !(spec.bp_beta > 0.0)) throw ArgumentError("beta-prime shapes must be positive");
      break;
  }
}

double beta_prime_sample(double alpha, double beta, Rng& rng) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ArgumentError("beta-prime shapes must be positive");
  }
  const double log_ratio = rng.log_gamma(alpha) - rng.log_gamma(beta);
  const double z = std::exp(log_ratio);
  return std::clamp(z, std::numeric_limits<double>::min(), std::numeric_limits<double>::max());
}

double stable_transform(double alpha, double u, double e) {
  if (alpha == 1.0) return std::tan(u);
  return std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
         std::pow(std::cos(u - alpha * u) / e, (1.0 - alpha) / alpha);
}

double stable_sample(double alpha, Rng& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ArgumentError("stable index must lie in (0, 2]");
  const double u = rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  const double e = rng.exponential();
  return stable_transform(alpha, u, e);
}

Trajectory simulate(const ProcessSpec& spec) {
  validate(spec);
  const std::size_t dim = spec.dim;
  Rng rng(spec.seed);
  std::vector<double> flat((spec.steps + 1) * dim, 0.0);
  std::vector<double> w = spec.initial.empty() ? std::vector<double>(dim, 0.0) : spec.initial;
  auto noise_sd = [&](std::size_t c) { return spec.noise.empty() ? 1.0 : std::sqrt(spec.noise[c]); };
  auto curvature = [&](std::size_t c) { return spec.curvature.empty() ? 1.0 : spec.curvature[c]; };

  for (std::size_t c = 0; c < dim; ++c) flat[c] = w[c];
  for (std::size_t k = 1; k <= spec.steps; ++k) {
    switch (spec.kind) {
      case ProcessKind::gaussian_walk:
        for (std::size_t c = 0; c < dim; ++c) w[c] += spec.step * noise_sd(c) * rng.normal();
        break;
      case ProcessKind::stable_levy_walk:
        for (std::size_t c = 0; c < dim; ++c) w[c] += spec.stable_scale * stable_sample(spec.stable_alpha, rng);
        break;
      case ProcessKind::beta_prime_walk: {
        const double angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
        const double z = beta_prime_sample(spec.bp_alpha, spec.bp_beta, rng);
        w[0] += std::cos(angle) * z;
        w[1] += std::sin(angle) * z;
        break;
      }
      case ProcessKind::perturbed_gd_quadratic:
        for (std::size_t c = 0; c < dim; ++c) {
          const double noise = spec.noise.empty() || spec.noise[c] > 0.0 ? noise_sd(c) * rng.normal() : 0.0;
          w[c] -= spec.step * (curvature(c) * w[c] + noise);
        }
        break;
    }
    for (std::size_t c = 0; c < dim; ++c) flat[k * dim + c] = w[c];
  }
  return Trajectory(std::move(flat), dim);
}

}  // namespace tailchain
