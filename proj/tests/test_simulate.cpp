#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "oracles.hpp"
#include "tailchain/error.hpp"
#include "tailchain/simulate.hpp"
#include "tailchain/stats.hpp"

using namespace tailchain;

namespace {

const double kKsCrit = 1.95 / std::sqrt(20000.0);  // 0.1% level

}  // namespace

TEST_CASE("every process returns steps + 1 points and is reproducible") {
  for (auto kind : {ProcessKind::gaussian_walk, ProcessKind::stable_levy_walk, ProcessKind::beta_prime_walk,
                    ProcessKind::perturbed_gd_quadratic}) {
    ProcessSpec spec;
    spec.kind = kind;
    spec.steps = 250;
    spec.seed = Seed{123};
    const auto a = simulate(spec);
    CHECK(a.size() == 251);
    CHECK(a.dim() == 2);
    CHECK(a == simulate(spec));
    spec.seed = Seed{124};
    CHECK_FALSE(a == simulate(spec));
    CHECK(parse_process_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_process_kind("brownian"), ArgumentError);
}

TEST_CASE("spec validation") {
  ProcessSpec spec;
  spec.kind = ProcessKind::beta_prime_walk;
  spec.dim = 3;
  CHECK_THROWS_AS(simulate(spec), ArgumentError);
  spec = ProcessSpec{};
  spec.kind = ProcessKind::stable_levy_walk;
  spec.stable_alpha = 2.5;
  CHECK_THROWS_AS(simulate(spec), ArgumentError);
  spec = ProcessSpec{};
  spec.noise = {1.0};
  CHECK_THROWS_AS(simulate(spec), ArgumentError);
  spec.noise = {1.0, -1.0};
  CHECK_THROWS_AS(simulate(spec), ArgumentError);
  spec = ProcessSpec{};
  spec.steps = 0;
  CHECK_THROWS_AS(simulate(spec), ArgumentError);
}

TEST_CASE("Gaussian walk increments have variance step^2 * noise") {
  ProcessSpec spec;
  spec.steps = 40000;
  spec.step = 0.5;
  spec.noise = {1.0, 4.0};
  spec.seed = Seed{6};
  const auto inc = increments(simulate(spec), 1);
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<double> x;
    for (std::size_t j = 0; j < inc.size(); ++j) x.push_back(inc.delta(j)[c]);
    const double var = stats::stddev(x) * stats::stddev(x);
    CHECK(var == doctest::Approx(0.25 * spec.noise[c]).epsilon(0.03));
  }
}

TEST_CASE("stable transform") {
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    for (double u : {0.1, 0.7, 1.3}) {
      CHECK(stable_transform(alpha, -u, 0.8) == doctest::Approx(-stable_transform(alpha, u, 0.8)).epsilon(1e-14));
    }
  }
  CHECK(stable_transform(1.0, 0.4, 2.0) == std::tan(0.4));
  // At alpha = 2 the transform is 2 sin(u) sqrt(e), a N(0, 2) draw.
  CHECK(stable_transform(2.0, 0.4, 1.7) == doctest::Approx(2.0 * std::sin(0.4) * std::sqrt(1.7)).epsilon(1e-14));
}

TEST_CASE("stable samples match the Cauchy and N(0, 2) laws") {
  Rng rng(Seed{17});
  std::vector<double> c(20000), g(20000);
  for (double& v : c) v = stable_sample(1.0, rng);
  for (double& v : g) v = stable_sample(2.0, rng);
  CHECK(oracle::ks_one_sample(c, [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; }) < kKsCrit);
  CHECK(oracle::ks_one_sample(g, [](double x) { return oracle::normal_cdf(x / std::sqrt(2.0)); }) < kKsCrit);
}

TEST_CASE("beta-prime samples match the beta-prime law") {
  for (auto [a, b] : {std::pair{0.5, 3.5}, std::pair{0.05, 3.5}, std::pair{2.0, 1.5}}) {
    Rng rng(Seed{static_cast<std::uint64_t>(a * 1000)});
    std::vector<double> z(20000);
    for (double& v : z) v = beta_prime_sample(a, b, rng);
    for (double v : z) REQUIRE(v > 0.0);
    const auto cdf = [a = a, b = b](double x) { return boost::math::ibeta(a, b, x / (1.0 + x)); };
    CHECK(oracle::ks_one_sample(z, cdf) < kKsCrit);
  }
}

TEST_CASE("beta-prime walk steps have beta-prime length and uniform direction") {
  ProcessSpec spec;
  spec.kind = ProcessKind::beta_prime_walk;
  spec.steps = 20000;
  spec.bp_alpha = 0.8;
  spec.seed = Seed{10};
  const auto inc = increments(simulate(spec), 1);
  std::vector<double> angle;
  for (std::size_t j = 0; j < inc.size(); ++j) angle.push_back(std::atan2(inc.delta(j)[1], inc.delta(j)[0]));
  CHECK(oracle::ks_one_sample(angle, [](double x) { return (x + std::numbers::pi) / (2.0 * std::numbers::pi); }) <
        kKsCrit);
  const auto cdf = [](double x) { return boost::math::ibeta(0.8, 3.5, x / (1.0 + x)); };
  CHECK(oracle::ks_one_sample(inc.norms(), cdf) < kKsCrit);
}

TEST_CASE("noise-free gradient descent contracts geometrically") {
  ProcessSpec spec;
  spec.kind = ProcessKind::perturbed_gd_quadratic;
  spec.steps = 50;
  spec.step = 0.1;
  spec.noise = {0.0, 0.0};
  spec.curvature = {1.0, 3.0};
  spec.initial = {2.0, -1.0};
  const auto t = simulate(spec);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(t(k, 0) == doctest::Approx(2.0 * std::pow(0.9, static_cast<double>(k))).epsilon(1e-12));
    CHECK(t(k, 1) == doctest::Approx(-1.0 * std::pow(0.7, static_cast<double>(k))).epsilon(1e-12));
  }
}
