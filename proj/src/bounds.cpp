#include "tailchain/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tailchain/error.hpp"

namespace tailchain {

double BoundInputs::l_rho() const noexcept { return std::max(loss_bound, lipschitz * rho); }

void validate(const BoundInputs& inp) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(inp.loss_bound) || !positive(inp.lipschitz) || !positive(inp.rho) || !positive(inp.n)) {
    throw ArgumentError("B, L, rho and n must be positive");
  }
  if (!(inp.delta > 0.0 && inp.delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  if (!(inp.gamma2 >= 0.0) || !(inp.mutual_info_inf >= 0.0) || !(inp.mutual_info_1 >= 0.0)) {
    throw ArgumentError("gamma2 and mutual-information inputs must be nonnegative");
  }
  if (!positive(inp.k1) || !positive(inp.k2)) throw ArgumentError("universal constants must be positive");
  if (inp.unbounded_tail_probability &&
      !(*inp.unbounded_tail_probability >= 0.0 && *inp.unbounded_tail_probability <= 1.0)) {
    throw ArgumentError("tail probability must lie in [0, 1]");
  }
}

double theorem1_high_prob_bound(const BoundInputs& inp) {
  validate(inp);
  const double root_n = std::sqrt(inp.n);
  return inp.k1 * inp.l_rho() *
         (inp.gamma2 / root_n + std::sqrt((std::log(1.0 / inp.delta) + inp.mutual_info_inf) / inp.n));
}

double theorem1_confidence(const BoundInputs& inp) {
  validate(inp);
  return 1.0 - inp.delta - inp.unbounded_tail_probability.value_or(0.0);
}

double theorem1_expectation_bound(const BoundInputs& inp) {
  validate(inp);
  return inp.k2 * inp.l_rho() * (inp.gamma2 + std::sqrt(inp.mutual_info_1)) / std::sqrt(inp.n);
}

double corollary1_bound(double alpha, double rho, double c_rho) {
  if (!(alpha > 0.0) || !(rho > 0.0) || !(c_rho > 0.0)) throw ArgumentError("alpha, rho and C_rho must be positive");
  if (rho * c_rho > 1.0) {
    throw ArgumentError("Ahlfors constant violates rho * C_rho <= 1 (got " + std::to_string(rho * c_rho) + ")");
  }
  return std::sqrt(std::numbers::pi * alpha) / (2.0 * rho * c_rho);
}

namespace {

KernelFunctionalResult integrate_masses(const std::vector<double>& radii, const std::vector<double>& masses,
                                        double rho, std::size_t dim) {
  if (!(rho > 0.0)) throw ArgumentError("rho must be positive");
  if (dim == 0) throw ArgumentError("dimension must be at least 1");
  const double base = static_cast<double>(dim + 2) * std::log(3.0);
  KernelFunctionalResult out;
  std::vector<double> xs, fs;
  for (std::size_t j = 0; j < radii.size() && radii[j] <= rho; ++j) {
    if (!(masses[j] > 0.0)) {
      ++out.trimmed_zero_mass;
      continue;
    }
    xs.push_back(radii[j]);
    fs.push_back(std::sqrt(base - std::log(std::min(masses[j], 1.0))));
  }
  if (xs.empty()) throw DegenerateError("ball masses are zero on every grid radius in [0, rho]");
  double integral = xs.front() * fs.front();
  for (std::size_t k = 1; k < xs.size(); ++k) integral += 0.5 * (xs[k] - xs[k - 1]) * (fs[k] + fs[k - 1]);
  integral += (rho - xs.back()) * fs.back();
  out.value = integral / rho;
  return out;
}

}  // namespace

KernelFunctionalResult kernel_functional(const BallMassCurve& curve, double rho, std::size_t dim) {
  if (curve.masses.size() != curve.radii.size()) throw ArgumentError("ball-mass curve has mismatched lengths");
  return integrate_masses(curve.radii.radii(), curve.masses, rho, dim);
}

KernelFunctionalResult kernel_functional_sup(const std::vector<BallMassCurve>& anchored, double rho, std::size_t dim) {
  if (anchored.empty()) throw ArgumentError("sup mode needs at least one anchored curve");
  std::vector<double> lowest = anchored.front().masses;
  for (const auto& c : anchored) {
    if (c.radii.radii() != anchored.front().radii.radii()) throw ArgumentError("anchored curves use different grids");
    for (std::size_t j = 0; j < lowest.size(); ++j) lowest[j] = std::min(lowest[j], c.masses[j]);
  }
  auto out = integrate_masses(anchored.front().radii.radii(), lowest, rho, dim);
  out.sup_mode = true;
  return out;
}

double j_integral(double a, double T, double rho, std::size_t dim, double rel_tol) {
  if (!(a > 0.0) || !(T > 0.0) || !(rho > 0.0)) throw ArgumentError("a, T and rho must be positive");
  if (dim == 0) throw ArgumentError("dimension must be at least 1");
  if (!(rel_tol > 0.0)) throw ArgumentError("tolerance must be positive");
  const double d = static_cast<double>(dim);
  const double s_power = d / 2.0 - 2.0;
  const double lower_s = 1.0 / T;
  const double inner_tol = rel_tol * 1e-3;
  // Inner value and absolute error per outer abscissa; the error is integrated by the same
  // outer rule so that points of negligible weight cannot dominate the estimate.
  std::map<double, std::pair<double, double>> inner_at;

  boost::math::quadrature::exp_sinh<double> inner_rule;
  // Inner integral over s in [1/T, inf). For D >= 3 the mass sits at s ~ 1/rate, beyond the
  // reach of exp_sinh when rate is tiny, so substitute s = 1/T + y/rate and factor out
  // rate^{-p-1} e^{-rate/T}; the remaining integrand decays on a unit scale.
  const bool rescale = dim >= 3;
  auto inner = [&](double v) {
    const double rate = a * v * rho * rho;
    const double c = rate * lower_s;
    auto shifted = [&](double x) {
      const double s = lower_s + x;
      return std::pow(s, s_power) * std::exp(-rate * s);
    };
    auto scaled = [&](double y) {
      const double e = std::exp(-y);
      return e == 0.0 ? 0.0 : std::pow(c + y, s_power) * e;
    };
    double err = 0.0, l1 = 0.0;
    double q = rescale ? inner_rule.integrate(scaled, inner_tol, &err, &l1)
                       : inner_rule.integrate(shifted, inner_tol, &err, &l1);
    if (rescale) {
      const double factor = std::exp(-c) * std::pow(rate, -s_power - 1.0);
      q *= factor;
      err *= factor;
    }
    return std::pair{q, err};
  };
  // v = u^{2/D} absorbs the v^{D/2-1} factor: dv v^{D/2-1} = (2/D) du.
  auto at = [&](double u) -> const std::pair<double, double>& {
    auto it = inner_at.find(u);
    if (it == inner_at.end()) it = inner_at.emplace(u, inner(std::pow(u, 2.0 / d))).first;
    return it->second;
  };
  auto outer = [&](double u) { return at(u).first; };
  auto outer_err = [&](double u) { return at(u).second; };

  boost::math::quadrature::tanh_sinh<double> outer_rule;
  double err = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  double q = 0.0, inner_err = 0.0;
  try {
    q = outer_rule.integrate(outer, 0.0, 1.0, rel_tol * 1e-2, &err, &l1, &levels);
    inner_err = outer_rule.integrate(outer_err, 0.0, 1.0, 1e-2);
  } catch (const std::exception& e) {
    throw ConvergenceError(std::string("J integral quadrature failed: ") + e.what(),
                           std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity());
  }
  const double value = 2.0 / (d * T) * q;
  const double rel_err = q > 0.0 ? (err + inner_err) / q : std::numeric_limits<double>::infinity();
  if (!std::isfinite(value) || !(rel_err <= rel_tol)) {
    throw ConvergenceError("J integral did not reach relative tolerance " + std::to_string(rel_tol), value,
                           rel_err * std::abs(value));
  }
  return value;
}

GaussRadialCheck gauss_radial_bounds_check(double a, double r, double rho, std::size_t dim) {
  if (!(a > 0.0) || !(r > 0.0) || !(rho > 0.0)) throw ArgumentError("a, r and rho must be positive");
  if (r > rho) throw ArgumentError("radius must not exceed rho");
  if (dim == 0) throw ArgumentError("dimension must be at least 1");
  const double d = static_cast<double>(dim);
  GaussRadialCheck out;
  auto radial = [&](double u) { return std::pow(u, d - 1.0) * std::exp(-a * u * u); };
  out.integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(radial, 0.0, r, 15, 1e-15);
  // I_rho with v = u^{2/D}: int_0^1 v^{D/2-1} e^{-a v rho^2} dv = (2/D) int_0^1 e^{-a rho^2 u^{2/D}} du.
  auto profile = [&](double u) { return std::exp(-a * rho * rho * std::pow(u, 2.0 / d)); };
  boost::math::quadrature::tanh_sinh<double> rule;
  out.i_rho = 2.0 / d * rule.integrate(profile, 0.0, 1.0, 1e-15);
  const double r_d = std::pow(r, d);
  out.lower = r_d / 2.0 * out.i_rho;
  out.upper = r_d / d;
  constexpr double slack = 1e-10;
  out.holds = out.lower <= out.integral + slack && out.integral <= out.upper + slack;
  return out;
}

}  // namespace tailchain
