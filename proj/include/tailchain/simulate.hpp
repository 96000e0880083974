#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tailchain/random.hpp"
#include "tailchain/trajectory.hpp"

namespace tailchain {

enum class ProcessKind { gaussian_walk, stable_levy_walk, beta_prime_walk, perturbed_gd_quadratic };

const char* to_string(ProcessKind k) noexcept;
ProcessKind parse_process_kind(std::string_view name);

struct ProcessSpec {
  ProcessKind kind = ProcessKind::gaussian_walk;
  std::size_t dim = 2;
  std::size_t steps = 1000;

  // gaussian_walk: W += step * N(0, diag(noise)).
  // perturbed_gd_quadratic: W -= step * (curvature .* W + N(0, diag(noise))).
  double step = 1.0;
  std::vector<double> noise;      // per-coordinate variance; empty means all ones
  std::vector<double> curvature;  // empty means all ones
  std::vector<double> initial;    // start point; empty means the origin

  // stable_levy_walk: W += stable_scale * (iid symmetric alpha-stable coordinates).
  double stable_alpha = 1.5;
  double stable_scale = 1.0;

  // beta_prime_walk: W += (cos U, sin U) * Z, U ~ U(-pi, pi), Z ~ BetaPrime(bp_alpha, bp_beta).
  double bp_alpha = 0.5;
  double bp_beta = 3.5;

  Seed seed{0};
};

/// Throws ArgumentError when the spec violates its invariants.
void validate(const ProcessSpec& spec);

/// steps + 1 points; bit-reproducible for a given spec.
Trajectory simulate(const ProcessSpec& spec);

/// Ratio of Gamma(alpha) and Gamma(beta) draws. Results below the smallest
/// normal double are raised to it so the draw stays positive.
double beta_prime_sample(double alpha, double beta, Rng& rng);

/// Chambers-Mallows-Stuck transform for a symmetric alpha-stable variate of
/// unit scale: u uniform on (-pi/2, pi/2), e standard exponential. Odd in u.
double stable_transform(double alpha, double u, double e);
double stable_sample(double alpha, Rng& rng);

}  // namespace tailchain
