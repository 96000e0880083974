#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tailchain/exponents.hpp"

namespace tailchain {

// Every calculator here is stated up to universal constants (K1, K2, K),
// which default to 1. The proofs only guarantee their existence; the known
// admissible values are far larger than necessary.

struct BoundInputs {
  double loss_bound = 1.0;  // B
  double lipschitz = 1.0;   // L
  double rho = 1.0;
  double n = 1.0;  // sample count
  double delta = 0.05;
  double gamma2 = 0.0;
  double mutual_info_inf = 0.0;  // I_inf, supplied by the caller
  double mutual_info_1 = 0.0;    // I_1, supplied by the caller
  double k1 = 1.0;
  double k2 = 1.0;
  /// P(sup R_n > B) for unbounded losses; never estimated here.
  std::optional<double> unbounded_tail_probability;

  double l_rho() const noexcept;
};

void validate(const BoundInputs& inp);

/// K1 L_rho (gamma2 / sqrt(n) + sqrt((log(1/delta) + I_inf) / n)).
double theorem1_high_prob_bound(const BoundInputs& inp);
/// Probability with which the high-probability bound holds:
/// 1 - delta, minus the unbounded-loss tail probability when supplied.
double theorem1_confidence(const BoundInputs& inp);
/// K2 L_rho (E gamma2 + sqrt(I_1)) / sqrt(n).
double theorem1_expectation_bound(const BoundInputs& inp);

/// (2 rho C_rho)^-1 sqrt(pi alpha); requires rho * C_rho <= 1.
double corollary1_bound(double alpha, double rho, double c_rho);

struct KernelFunctionalResult {
  double value = 0.0;
  std::size_t trimmed_zero_mass = 0;  // grid radii dropped for zero mass
  bool sup_mode = false;
};

/// (1/rho) int_0^rho sqrt((D + 2) log 3 - log m(r)) dr by the trapezoid
/// rule on the curve's grid (radii above rho are ignored). The integrand is
/// held constant from 0 to the first positive-mass radius and from the last
/// grid radius to rho.
KernelFunctionalResult kernel_functional(const BallMassCurve& curve, double rho, std::size_t dim);
/// Same, with the pointwise minimum mass across anchored curves standing in
/// for the infimum over starting points.
KernelFunctionalResult kernel_functional_sup(const std::vector<BallMassCurve>& anchored, double rho, std::size_t dim);

/// J_{rho,T}(a, D) = (1/T) int_0^1 int_{1/T}^inf v^{D/2-1} s^{D/2-2} exp(-a s v rho^2) ds dv
/// by nested adaptive quadrature. Throws ConvergenceError (with the partial
/// estimate) when the relative tolerance is not met.
double j_integral(double a, double T, double rho, std::size_t dim, double rel_tol = 1e-6);

struct GaussRadialCheck {
  double integral = 0.0;  // int_0^r u^{D-1} exp(-a u^2) du
  double lower = 0.0;     // (r^D / 2) I_rho(a, D)
  double upper = 0.0;     // r^D / D
  double i_rho = 0.0;     // int_0^1 v^{D/2-1} exp(-a v rho^2) dv
  bool holds = false;
};

/// Evaluates both sides of the Gaussian ball-integral sandwich.
GaussRadialCheck gauss_radial_bounds_check(double a, double r, double rho, std::size_t dim);

}  // namespace tailchain
