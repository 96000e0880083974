#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "oracles.hpp"
#include "tailchain/bounds.hpp"
#include "tailchain/error.hpp"
#include "tailchain/random.hpp"

using namespace tailchain;

TEST_CASE("high-probability bound arithmetic") {
  BoundInputs b;
  b.n = 100;
  b.delta = std::exp(-1.0);
  CHECK(theorem1_high_prob_bound(b) == 0.1);
  CHECK(theorem1_confidence(b) == 1.0 - std::exp(-1.0));

  b.gamma2 = 1.3;
  b.mutual_info_inf = 0.7;
  const double base = theorem1_high_prob_bound(b);
  BoundInputs doubled = b;
  doubled.n = 200;
  CHECK(theorem1_high_prob_bound(doubled) == doctest::Approx(base / std::sqrt(2.0)).epsilon(1e-15));

  BoundInputs steep = b;
  steep.lipschitz = 2.0;
  CHECK(steep.l_rho() == 2.0);
  CHECK(theorem1_high_prob_bound(steep) == doctest::Approx(2.0 * base).epsilon(1e-15));

  b.unbounded_tail_probability = 0.01;
  CHECK(theorem1_confidence(b) == doctest::Approx(1.0 - std::exp(-1.0) - 0.01).epsilon(1e-15));

  b.delta = 1.0;
  CHECK_THROWS_AS(theorem1_high_prob_bound(b), ArgumentError);
  b.delta = 0.0;
  CHECK_THROWS_AS(theorem1_high_prob_bound(b), ArgumentError);
  b.delta = 0.1;
  b.n = 0.0;
  CHECK_THROWS_AS(theorem1_high_prob_bound(b), ArgumentError);
}

TEST_CASE("expectation bound arithmetic") {
  BoundInputs b;
  b.gamma2 = 1.0;
  b.n = 4;
  CHECK(theorem1_expectation_bound(b) == 0.5);
  b.gamma2 = 0.0;
  b.mutual_info_1 = 4.0;
  CHECK(theorem1_expectation_bound(b) == 1.0);
  const double base = theorem1_expectation_bound(b);
  b.k2 = 3.0;
  CHECK(theorem1_expectation_bound(b) == 3.0 * base);
}

TEST_CASE("Ahlfors-regular bound") {
  CHECK(corollary1_bound(1.0, 1.0, 1.0) == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-15));
  CHECK(corollary1_bound(4.0, 1.0, 1.0) == 2.0 * corollary1_bound(1.0, 1.0, 1.0));
  CHECK(corollary1_bound(1.0, 0.5, 2.0) == corollary1_bound(1.0, 1.0, 1.0));
  CHECK_THROWS_AS(corollary1_bound(1.0, 1.0, 1.5), ArgumentError);
}

TEST_CASE("kernel functional") {
  const auto radii = RadiusGrid::log_spaced(1e-8, 1.0, 4000, 1.0);
  SUBCASE("unit masses give the constant integrand") {
    for (std::size_t dim : {1u, 2u, 5u}) {
      BallMassCurve c{radii, std::vector<double>(radii.size(), 1.0), {1}};
      CHECK(kernel_functional(c, 1.0, dim).value ==
            doctest::Approx(std::sqrt(static_cast<double>(dim + 2) * std::log(3.0))).epsilon(1e-14));
    }
  }
  SUBCASE("power-law masses match the quadrature oracle") {
    for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
      BallMassCurve c{radii, {}, {1}};
      for (double r : radii.radii()) c.masses.push_back(std::pow(r, alpha));
      const double expected = oracle::log_mass_integral(4.0 * std::log(3.0), alpha);
      CHECK(std::abs(kernel_functional(c, 1.0, 2).value - expected) <= 1e-4);
    }
  }
  SUBCASE("smaller masses give a larger value") {
    BallMassCurve c{radii, {}, {1}};
    for (double r : radii.radii()) c.masses.push_back(std::pow(r, 1.5));
    BallMassCurve half = c;
    for (double& m : half.masses) m *= 0.5;
    CHECK(kernel_functional(half, 1.0, 2).value > kernel_functional(c, 1.0, 2).value);
    BallMassCurve bumped = c;
    bumped.masses[2000] = std::min(1.0, bumped.masses[2000] * 4.0);
    CHECK(kernel_functional(bumped, 1.0, 2).value < kernel_functional(c, 1.0, 2).value);
  }
  SUBCASE("zero masses are trimmed, all-zero is degenerate") {
    const RadiusGrid g({0.1, 0.2, 0.5, 1.0}, 1.0);
    BallMassCurve c{g, {0.0, 0.0, 0.5, 1.0}, {1}};
    const auto r = kernel_functional(c, 1.0, 1);
    CHECK(r.trimmed_zero_mass == 2);
    const double f_half = std::sqrt(3.0 * std::log(3.0) + std::log(2.0));
    const double f_one = std::sqrt(3.0 * std::log(3.0));
    CHECK(r.value == doctest::Approx(0.5 * f_half + 0.5 * (f_half + f_one) * 0.5).epsilon(1e-14));
    BallMassCurve zero{g, {0.0, 0.0, 0.0, 0.0}, {1}};
    CHECK_THROWS_AS(kernel_functional(zero, 1.0, 1), DegenerateError);
  }
  SUBCASE("sup mode uses the smallest anchored mass") {
    const RadiusGrid g({0.25, 0.5, 1.0}, 1.0);
    std::vector<BallMassCurve> anchored{{g, {0.2, 0.5, 1.0}, {1}}, {g, {0.1, 0.6, 0.9}, {1}}};
    const auto sup = kernel_functional_sup(anchored, 1.0, 2);
    CHECK(sup.sup_mode);
    const auto expected = kernel_functional(BallMassCurve{g, {0.1, 0.5, 0.9}, {1}}, 1.0, 2);
    CHECK(sup.value == expected.value);
    CHECK(sup.value > kernel_functional(anchored[0], 1.0, 2).value);
  }
}

TEST_CASE("J integral closed forms") {
  // D = 2: int_0^1 E1(v) dv = E1(1) + 1 - 1/e.
  const double d2 = boost::math::expint(1, 1.0) + 1.0 - std::exp(-1.0);
  CHECK(j_integral(1.0, 1.0, 1.0, 2) == doctest::Approx(d2).epsilon(1e-8));
  CHECK(d2 == doctest::Approx(0.8515044932).epsilon(1e-9));
  // D = 4: (1 - e^-c) / (T a rho^2 c) with c = a rho^2 / T.
  for (auto [a, T, rho] : {std::tuple{1.0, 1.0, 1.0}, std::tuple{2.0, 10.0, 0.5}, std::tuple{0.5, 3.0, 1.0}}) {
    const double c = a * rho * rho / T;
    CHECK(j_integral(a, T, rho, 4) == doctest::Approx((1.0 - std::exp(-c)) / (T * a * rho * rho * c)).epsilon(1e-8));
  }
}

TEST_CASE("J integral agrees with the Riemann-sum oracle") {
  for (auto [a, T, rho, dim] : {std::tuple{1.0, 1.0, 1.0, std::size_t{2}}, std::tuple{0.5, 10.0, 0.5, std::size_t{1}},
                                std::tuple{4.0, 1.0, 1.0, std::size_t{3}}}) {
    const double ref = oracle::j_riemann(a, T, rho, dim);
    CHECK(std::abs(j_integral(a, T, rho, dim) - ref) <= 1e-4 * ref);
  }
}

TEST_CASE("J integral decreases in a") {
  for (std::size_t dim = 1; dim <= 4; ++dim) {
    for (double T : {1.0, 10.0}) {
      for (double rho : {0.5, 1.0}) {
        double prev = j_integral(0.5, T, rho, dim);
        for (double a : {1.0, 2.0, 4.0}) {
          const double cur = j_integral(a, T, rho, dim);
          CHECK(cur < prev);
          prev = cur;
        }
      }
    }
  }
}

TEST_CASE("J integral input checks and convergence failure") {
  CHECK_THROWS_AS(j_integral(0.0, 1.0, 1.0, 2), ArgumentError);
  CHECK_THROWS_AS(j_integral(1.0, 1.0, 1.0, 0), ArgumentError);
  try {
    j_integral(1.0, 1.0, 1.0, 2, 1e-300);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.partial_estimate() == doctest::Approx(0.8515044932).epsilon(1e-6));
  }
}

TEST_CASE("Gaussian ball-integral sandwich") {
  const auto c = gauss_radial_bounds_check(1.0, 0.5, 1.0, 2);
  CHECK(c.holds);
  CHECK(c.integral == doctest::Approx((1.0 - std::exp(-0.25)) / 2.0).epsilon(1e-13));

  const auto flat = gauss_radial_bounds_check(1e-14, 0.7, 1.0, 3);
  CHECK(flat.integral == doctest::Approx(std::pow(0.7, 3.0) / 3.0).epsilon(1e-12));
  CHECK(flat.upper - flat.integral < 1e-12);

  for (std::size_t dim = 1; dim <= 5; ++dim) {
    const auto edge = gauss_radial_bounds_check(1.7, 0.8, 0.8, dim);
    CHECK(std::abs(edge.lower - edge.integral) <= 1e-10);
  }

  Rng rng(Seed{2718});
  for (int i = 0; i < 100; ++i) {
    const double rho = rng.uniform(0.1, 3.0);
    const double r = rho * rng.uniform_open();
    const double a = std::exp(rng.uniform(-5.0, 3.0));
    const auto dim = static_cast<std::size_t>(1 + rng.uniform(0.0, 6.0));
    CHECK(gauss_radial_bounds_check(a, r, rho, dim).holds);
  }
  CHECK_THROWS_AS(gauss_radial_bounds_check(1.0, 1.5, 1.0, 2), ArgumentError);
}
