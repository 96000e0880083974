#include "tailchain/ft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tailchain/error.hpp"
#include "tailchain/parallel.hpp"

namespace tailchain {

namespace {

constexpr double kMassFloor = 1e-300;

// sup over C in (0,1) of (1 - C) / sqrt(-log C) is 0.63817...; it bounds
// |d row / rho| per unit of |dz|_inf, so a cached row value stays an upper
// bound after adding this constant times the sup-norm movement of z.
constexpr double kRowLipschitz = 0.6382;
constexpr double kBoundSlack = 1e-12;

}  // namespace

TruncatedGram::TruncatedGram(const Trajectory& w, double rho) : n_(w.size()), rho_(rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ArgumentError("rho must be positive and finite");
  if (n_ > std::numeric_limits<std::uint32_t>::max()) throw SizeError("too many points for a Gram matrix");
  entries_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double d = std::min(rho, distance(w.point(i), w.point(j)));
      entries_[i * n_ + j] = d;
      entries_[j * n_ + i] = d;
    }
  }
  sorted_.resize(n_ * n_);
  order_.resize(n_ * n_);
  active_.resize(n_);
  std::vector<std::uint32_t> idx(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    std::iota(idx.begin(), idx.end(), 0u);
    const double* row = entries_.data() + i * n_;
    // The self-distance comes first even when other points coincide with w_i.
    std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (row[a] != row[b]) return row[a] < row[b];
      return (a == i) > (b == i);
    });
    std::size_t active = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      order_[i * n_ + j] = idx[j];
      sorted_[i * n_ + j] = row[idx[j]];
      if (row[idx[j]] < rho) active = j + 1;
    }
    active_[i] = active;
  }
}

double TruncatedGram::row_integral(std::size_t i, const std::vector<double>& p) const {
  const double* dist = sorted_.data() + i * n_;
  const std::uint32_t* ord = order_.data() + i * n_;
  const std::size_t segments = std::min(active_[i], n_ - 1);
  thread_local std::vector<double> neg_log;
  neg_log.resize(segments);
  // Prefix masses while C <= 1/2; beyond that -log C is taken from the tail
  // 1 - C, summed from the far end, to avoid cancellation near full mass.
  double mass = 0.0;
  std::size_t half = segments;
  for (std::size_t j = 0; j < segments; ++j) {
    mass += p[ord[j]];
    if (mass > 0.5) {
      half = j;
      break;
    }
    neg_log[j] = std::max(mass, kMassFloor);
  }
  if (half < segments) {
    double tail = 0.0;
    for (std::size_t j = segments; j < n_; ++j) tail += p[ord[j]];
    for (std::size_t j = segments; j-- > half;) {
      neg_log[j] = -std::log1p(-std::min(tail, 0.5));
      tail += p[ord[j]];
    }
  }
  for (std::size_t j = 0; j < half; ++j) neg_log[j] = -std::log(neg_log[j]);
  double total = 0.0;
  for (std::size_t j = 0; j < segments; ++j) {
    const double seg = dist[j + 1] - dist[j];
    total += seg * std::sqrt(std::max(neg_log[j], 0.0));
  }
  return total;
}

const char* to_string(FtMethod m) noexcept {
  switch (m) {
    case FtMethod::subgradient:
      return "subgradient";
    case FtMethod::uniform:
      return "uniform";
    case FtMethod::oracle:
      return "oracle";
  }
  return "unknown";
}

namespace {

double objective(const TruncatedGram& g, const std::vector<double>& p) {
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) best = std::max(best, g.row_integral(i, p));
  return best / g.rho();
}

void softmax(const std::vector<double>& z, std::vector<double>& p) {
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    p[k] = std::exp(z[k] - top);
    total += p[k];
  }
  for (double& v : p) v /= total;
}

// Gradient of row_integral(i, softmax(z)) / rho with respect to z. Written in
// terms of the tail masses 1 - C_j so that it stays bounded as C_j -> 1.
void row_gradient(const TruncatedGram& g, std::size_t i, const std::vector<double>& p, std::vector<double>& grad) {
  const std::size_t n = g.size();
  const std::size_t segments = std::min(g.active(i), n - 1);
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) tail[j] = tail[j + 1] + p[g.order(i, j)];
  // below[j] = sum_{j' < j} A_j' C_j', above[j] = sum_{j' >= j} A_j' eps_j'.
  std::vector<double> below(segments + 1, 0.0);
  std::vector<double> above(segments + 1, 0.0);
  std::vector<double> a_c(segments, 0.0);
  std::vector<double> a_eps(segments, 0.0);
  double mass = 0.0;
  for (std::size_t j = 0; j < segments; ++j) {
    mass += p[g.order(i, j)];
    const double seg = g.sorted(i, j + 1) - g.sorted(i, j);
    const double eps = tail[j + 1];
    if (!(seg > 0.0) || !(eps > 0.0) || mass < kMassFloor) continue;
    const double neg_log = mass <= 0.5 ? -std::log(mass) : -std::log1p(-eps);
    if (!(neg_log > 0.0)) continue;
    const double root = std::sqrt(neg_log);
    a_c[j] = seg / (2.0 * root);
    a_eps[j] = seg * eps / (2.0 * mass * root);
  }
  for (std::size_t j = 0; j < segments; ++j) below[j + 1] = below[j] + a_c[j];
  for (std::size_t j = segments; j-- > 0;) above[j] = above[j + 1] + a_eps[j];
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t m = g.order(i, q);
    const std::size_t cut = std::min(q, segments);
    grad[m] = p[m] * (below[cut] - above[cut]) / g.rho();
  }
}

struct RestartResult {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> weights;
  std::vector<double> trace;
};

RestartResult run_restart(const TruncatedGram& g, const FtOptions& opts, std::size_t restart) {
  const std::size_t n = g.size();
  std::vector<double> z(n, 0.0);
  if (restart > 0) {
    Rng rng(opts.seed.derive(restart));
    for (double& v : z) v = rng.normal();
  }
  std::vector<double> p(n), grad(n);
  std::vector<double> cached(n, 0.0), snapshot(n, 0.0);
  std::vector<char> fresh(n, 0);
  double drift = 0.0;
  bool first = true;
  std::size_t previous = 0;
  RestartResult out;
  out.trace.reserve(opts.iterations);

  for (std::size_t t = 1; t <= opts.iterations; ++t) {
    softmax(z, p);
    // Exact max over rows; rows whose cached bound cannot reach the current
    // best are skipped. Ties go to the lowest row index.
    std::fill(fresh.begin(), fresh.end(), 0);
    double best = -1.0;
    std::size_t arg = n;
    auto visit = [&](std::size_t i) {
      const double v = g.row_integral(i, p) / g.rho();
      cached[i] = v;
      snapshot[i] = drift;
      fresh[i] = 1;
      if (v > best || (v == best && i < arg)) {
        best = v;
        arg = i;
      }
    };
    if (!first) visit(previous);
    for (std::size_t i = 0; i < n; ++i) {
      if (fresh[i]) continue;
      if (first || cached[i] + kRowLipschitz * (drift - snapshot[i]) + kBoundSlack >= best) visit(i);
    }
    first = false;
    previous = arg;

    out.trace.push_back(best);
    if (best < out.value) {
      out.value = best;
      out.weights = p;
    }

    row_gradient(g, arg, p, grad);
    // Normalized step: the largest coordinate of z moves by step / sqrt(t).
    double largest = 0.0;
    for (double v : grad) largest = std::max(largest, std::abs(v));
    if (!(largest > 0.0)) break;
    const double scale = opts.step / std::sqrt(static_cast<double>(t)) / largest;
    // softmax ignores constant shifts, so only half the oscillation of the
    // step counts towards the sup-norm movement.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < n; ++k) {
      const double dz = scale * grad[k];
      z[k] -= dz;
      lo = std::min(lo, dz);
      hi = std::max(hi, dz);
    }
    drift += 0.5 * (hi - lo);
  }
  return out;
}

}  // namespace

double ft_objective(const TruncatedGram& g, const SimplexWeights& p) {
  if (p.size() != g.size()) {
    throw ArgumentError("weights have length " + std::to_string(p.size()) + " but the Gram matrix has " +
                        std::to_string(g.size()) + " points");
  }
  return objective(g, p.values());
}

FtEstimate estimate_gamma2(const TruncatedGram& g, const FtOptions& opts) {
  const std::size_t n = g.size();
  if (opts.iterations == 0 || opts.restarts == 0) throw ArgumentError("optimizer needs at least one iteration and restart");
  if (!(opts.step > 0.0)) throw ArgumentError("optimizer step must be positive");
  const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  const double uniform_value = objective(g, uniform);
  if (n == 1) return FtEstimate{0.0, SimplexWeights({1.0}), {0.0}, FtMethod::uniform};

  std::vector<RestartResult> results(opts.restarts);
  parallel_for(opts.restarts, opts.threads, [&](std::size_t r) { results[r] = run_restart(g, opts, r); });
  std::size_t winner = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].value < results[winner].value) winner = r;
  }
  RestartResult& best = results[winner];
  if (uniform_value < best.value) {
    return FtEstimate{uniform_value, SimplexWeights(uniform), std::move(best.trace), FtMethod::uniform};
  }
  // Renormalize: softmax output can drift from 1 by a few ulps.
  double total = 0.0;
  for (double v : best.weights) total += v;
  for (double& v : best.weights) v /= total;
  return FtEstimate{best.value, SimplexWeights(std::move(best.weights)), std::move(best.trace), FtMethod::subgradient};
}

FtEstimate estimate_gamma2(const Trajectory& w, double rho, const FtOptions& opts) {
  return estimate_gamma2(TruncatedGram(w, rho), opts);
}

namespace {

void enumerate(const TruncatedGram& g, std::size_t q, std::size_t k, std::size_t remaining, std::vector<double>& p,
               std::vector<std::size_t>& units, double& best, std::vector<double>& best_p) {
  const std::size_t n = g.size();
  if (k + 1 == n) {
    units[k] = remaining;
    p[k] = static_cast<double>(remaining) / static_cast<double>(q);
    const double v = objective(g, p);
    if (v < best) {
      best = v;
      best_p = p;
    }
    return;
  }
  for (std::size_t u = 0; u <= remaining; ++u) {
    units[k] = u;
    p[k] = static_cast<double>(u) / static_cast<double>(q);
    enumerate(g, q, k + 1, remaining - u, p, units, best, best_p);
  }
}

}  // namespace

FtEstimate brute_force_gamma2(const Trajectory& w, double rho, std::size_t grid_resolution) {
  if (w.size() > 6) throw SizeError("brute-force oracle is limited to 6 points, got " + std::to_string(w.size()));
  if (grid_resolution == 0) throw ArgumentError("grid resolution must be positive");
  const TruncatedGram g(w, rho);
  const std::size_t n = g.size();
  std::vector<double> p(n, 0.0), best_p(n, 0.0);
  std::vector<std::size_t> units(n, 0);
  double best = std::numeric_limits<double>::infinity();
  enumerate(g, grid_resolution, 0, grid_resolution, p, units, best, best_p);
  return FtEstimate{best, SimplexWeights(best_p), {best}, FtMethod::oracle};
}

double default_rho(std::optional<double> loss_bound, std::optional<double> lipschitz) {
  if (loss_bound && lipschitz) {
    if (!(*loss_bound > 0.0) || !(*lipschitz > 0.0)) throw ArgumentError("B and L must be positive");
    return *loss_bound / *lipschitz;
  }
  return 1.0;
}

}  // namespace tailchain
