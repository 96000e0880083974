#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailchain/error.hpp"
#include "tailchain/exponents.hpp"
#include "tailchain/random.hpp"
#include "tailchain/simulate.hpp"

using namespace tailchain;

namespace {

std::vector<double> pareto(double alpha_survival, std::size_t n, Seed seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = std::pow(rng.uniform_open(), -1.0 / alpha_survival);
  return x;
}

}  // namespace

TEST_CASE("two-sample fit with fixed cutoff is the closed-form MLE") {
  PowerLawOptions opts;
  opts.x_min = 1.0;
  const auto r = fit_power_law(std::vector<double>{1.0, 4.0}, opts);
  CHECK(r.alpha_density == 1.0 + 2.0 / std::log(4.0));
  CHECK(r.alpha_survival == r.alpha_density - 1.0);
  CHECK(r.n_tail == 2);
  CHECK(r.low_sample_warning);
}

TEST_CASE("Pareto samples recover their exponent") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto r = fit_power_law(pareto(1.5, 10000, Seed{s}));
    CHECK(r.alpha_survival == doctest::Approx(1.5).epsilon(0.1));
    CHECK(r.x_min >= 1.0);
    CHECK(r.ks_distance < 0.05);
    CHECK_FALSE(r.low_sample_warning);
  }
}

TEST_CASE("power-law fit rejects bad input") {
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1.0, -2.0}), ArgumentError);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>(10, 2.5)), DegenerateError);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{}), InsufficientDataError);
}

TEST_CASE("reciprocal increments of a uniform-step walk have lower tail exponent 1") {
  Rng rng(Seed{31});
  std::vector<double> flat{0.0};
  for (int i = 0; i < 20000; ++i) flat.push_back(flat.back() + (rng.uniform_open() < 0.5 ? -1 : 1) * rng.uniform_open());
  const auto r = lower_tail_exponent_reciprocal(Trajectory(flat, 1));
  CHECK(r.fit.alpha_survival == doctest::Approx(1.0).epsilon(0.1));
  CHECK(r.zero_increments == 0);
}

TEST_CASE("reciprocal fit needs 50 nonzero increments") {
  std::vector<double> flat(200, 0.0);
  for (std::size_t i = 0; i < 40; ++i) flat[i + 1] = static_cast<double>(i + 1);
  for (std::size_t i = 41; i < flat.size(); ++i) flat[i] = flat[40];
  CHECK_THROWS_AS(lower_tail_exponent_reciprocal(Trajectory(flat, 1)), InsufficientDataError);
}

TEST_CASE("ball-mass curve by hand") {
  const Trajectory t(std::vector<double>{0.0, 1.0, 3.0}, 1);
  const RadiusGrid radii({0.5, 1.0, 1.5, 2.0}, 2.0);
  const std::vector<std::size_t> lag1{1};
  const auto c1 = ball_mass_curve(t, lag1, radii);
  CHECK(c1.masses == std::vector<double>{0.0, 0.5, 0.5, 1.0});
  const std::vector<std::size_t> both{1, 2};
  const auto c2 = ball_mass_curve(t, both, radii);
  CHECK(c2.masses == std::vector<double>{0.0, 0.25, 0.25, 0.5});
  const std::vector<std::size_t> bad{3};
  CHECK_THROWS_AS(ball_mass_curve(t, bad, radii), ArgumentError);
}

TEST_CASE("ball-mass exponent of an analytic curve") {
  const auto radii = RadiusGrid::log_spaced(1e-3, 1.0, 60, 1.0);
  BallMassCurve c{radii, {}, {1}};
  for (double r : radii.radii()) c.masses.push_back(0.3 * std::pow(r, 1.7));
  const auto fit = fit_ball_mass_exponent(c);
  CHECK(fit.alpha == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.points >= 5);
  CHECK_THROWS_AS(fit_ball_mass_exponent(c, {0.5, 0.6}), InsufficientDataError);
}

TEST_CASE("anchored curves split the start points") {
  ProcessSpec spec;
  spec.steps = 400;
  spec.seed = Seed{2};
  const auto t = simulate(spec);
  const std::vector<std::size_t> lags{1, 2};
  const auto radii = RadiusGrid::log_spaced(1e-2, 5.0, 30, 5.0);
  const auto curves = anchored_ball_mass_curves(t, lags, radii, 4);
  REQUIRE(curves.size() == 4);
  const auto whole = ball_mass_curve(t, lags, radii);
  for (std::size_t j = 0; j < radii.size(); ++j) {
    double lo = 1.0, hi = 0.0;
    for (const auto& c : curves) {
      lo = std::min(lo, c.masses[j]);
      hi = std::max(hi, c.masses[j]);
      if (j > 0) CHECK(c.masses[j] >= c.masses[j - 1]);
    }
    CHECK(lo <= whole.masses[j] + 1e-12);
    CHECK(hi >= whole.masses[j] - 1e-12);
  }
  CHECK_THROWS_AS(anchored_ball_mass_curves(t, lags, radii, 0), ArgumentError);
}

TEST_CASE("stable index of Gaussian and Cauchy samples") {
  Rng rng(Seed{1});
  std::vector<double> z(100000);
  for (double& v : z) v = rng.normal();
  const auto g = stable_index(z, 10);
  CHECK(g.alpha_hat >= 1.9);
  CHECK(g.alpha_hat <= 2.0);

  std::vector<double> c(100000);
  for (double& v : c) v = stable_sample(1.0, rng);
  CHECK(stable_index(c, 10).alpha_hat == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("stable index is exactly invariant under power-of-two scaling and negation") {
  Rng rng(Seed{77});
  std::vector<double> x(5000);
  for (double& v : x) v = stable_sample(1.5, rng);
  const double base = stable_index(x, 10).alpha_hat;
  for (double c : {8.0, -0.25, 1024.0, -1.0}) {
    std::vector<double> y(x);
    for (double& v : y) v *= c;
    CHECK(stable_index(y, 10).alpha_hat == base);
  }
  std::vector<double> y(x);
  for (double& v : y) v *= 3.7;
  CHECK(stable_index(y, 10).alpha_hat == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("stable index input checks") {
  std::vector<double> x(99, 1.0);
  CHECK_THROWS_AS(stable_index(x, 10), InsufficientDataError);
  CHECK_THROWS_AS(stable_index(x, 1), ArgumentError);
  std::vector<double> zeros(100, 0.0);
  CHECK_THROWS_AS(stable_index(zeros, 10), DegenerateError);
  std::vector<double> some(200);
  Rng rng(Seed{4});
  for (double& v : some) v = rng.normal();
  some[3] = 0.0;
  CHECK(stable_index(some, 10).dropped_zeros == 1);
}

TEST_CASE("layerwise stable index takes the median over blocks") {
  ProcessSpec spec;
  spec.kind = ProcessKind::stable_levy_walk;
  spec.dim = 3;
  spec.steps = 3000;
  spec.stable_alpha = 1.2;
  spec.seed = Seed{9};
  const auto t = simulate(spec);
  const auto r = layerwise_stable_index(t, {{0}, {1}, {2}}, 10);
  REQUIRE(r.per_block.size() == 3);
  std::vector<double> sorted = r.per_block;
  std::sort(sorted.begin(), sorted.end());
  CHECK(r.alpha_hat == sorted[1]);
  CHECK(r.alpha_hat == doctest::Approx(1.2).epsilon(0.15));

  CHECK_THROWS_AS(layerwise_stable_index(t, {{0, 1}}, 10), ArgumentError);
  CHECK_THROWS_AS(layerwise_stable_index(t, {{0, 1}, {1, 2}}, 10), ArgumentError);
  CHECK_THROWS_AS(layerwise_stable_index(t, {{0, 1, 2, 3}}, 10), ArgumentError);
}
