#include "tailchain/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "tailchain/error.hpp"
#include "tailchain/stats.hpp"

namespace tailchain {

namespace {

constexpr std::size_t kMinPowerLawSamples = 50;

struct Candidate {
  double alpha_density;
  double ks;
  std::size_t start;
  double x_min;
};

// Fit on the sorted suffix x[start..] (all >= x_min); nullopt when the tail
// is too short or has zero log-spread.
std::optional<Candidate> fit_suffix(const std::vector<double>& x, const std::vector<double>& log_suffix,
                                    std::size_t start, double x_min) {
  const std::size_t n_tail = x.size() - start;
  if (n_tail < 2) return std::nullopt;
  const double spread = log_suffix[start] - static_cast<double>(n_tail) * std::log(x_min);
  if (!(spread > 0.0)) return std::nullopt;
  const double alpha_density = 1.0 + static_cast<double>(n_tail) / spread;
  const double tail_exponent = alpha_density - 1.0;
  const double count = static_cast<double>(n_tail);
  double ks = 0.0;
  for (std::size_t i = 0; i < n_tail; ++i) {
    const double cdf = 1.0 - std::pow(x[start + i] / x_min, -tail_exponent);
    ks = std::max({ks, static_cast<double>(i + 1) / count - cdf, cdf - static_cast<double>(i) / count});
  }
  return Candidate{alpha_density, std::min(ks, 1.0), start, x_min};
}

}  // namespace

TailFitResult fit_power_law(std::span<const double> samples, const PowerLawOptions& opts) {
  if (samples.empty()) throw InsufficientDataError("power-law fit needs samples");
  std::vector<double> x(samples.begin(), samples.end());
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("power-law samples must be positive and finite");
  }
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) throw DegenerateError("all power-law samples are equal (zero log-spread)");
  const std::size_t n = x.size();
  std::vector<double> log_suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) log_suffix[i] = log_suffix[i + 1] + std::log(x[i]);

  std::optional<Candidate> best;
  if (opts.x_min) {
    if (!(*opts.x_min > 0.0) || !std::isfinite(*opts.x_min)) throw ArgumentError("x_min must be positive");
    const auto start = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), *opts.x_min) - x.begin());
    best = fit_suffix(x, log_suffix, start, *opts.x_min);
    if (!best) throw DegenerateError("no usable tail above the forced x_min");
  } else {
    const std::size_t grid = std::max<std::size_t>(opts.quantile_grid, 1);
    std::size_t last_start = n;
    for (std::size_t k = 0; k < grid; ++k) {
      const std::size_t idx = k * n / grid;
      // First occurrence of the candidate value, so ties enter the tail.
      const auto start = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), x[idx]) - x.begin());
      if (start == last_start) continue;
      last_start = start;
      const auto c = fit_suffix(x, log_suffix, start, x[start]);
      if (c && (!best || c->ks < best->ks)) best = c;
    }
  }
  if (!best) throw DegenerateError("no candidate cutoff leaves a tail with positive log-spread");

  TailFitResult r;
  r.alpha_density = best->alpha_density;
  r.alpha_survival = best->alpha_density - 1.0;
  r.x_min = best->x_min;
  r.ks_distance = best->ks;
  r.n_tail = n - best->start;
  r.n_samples = n;
  r.low_sample_warning = n < kMinPowerLawSamples;
  return r;
}

ReciprocalTailFit lower_tail_exponent_reciprocal(const Trajectory& t, const PowerLawOptions& opts) {
  if (t.size() < 2) throw InsufficientDataError("trajectory has no increments");
  const auto norms = increments(t, 1).norms();
  std::vector<double> reciprocal;
  reciprocal.reserve(norms.size());
  std::size_t zeros = 0;
  for (double r : norms) {
    if (r > 0.0) {
      reciprocal.push_back(1.0 / r);
    } else {
      ++zeros;
    }
  }
  if (reciprocal.size() < kMinPowerLawSamples) {
    throw InsufficientDataError("need at least 50 nonzero increments, found " + std::to_string(reciprocal.size()));
  }
  return ReciprocalTailFit{fit_power_law(reciprocal, opts), zeros};
}

namespace {

std::vector<double> masses_for(const std::vector<std::vector<double>>& sorted_norms, const RadiusGrid& radii) {
  std::vector<double> masses(radii.size(), 0.0);
  std::vector<double> per_lag(sorted_norms.size());
  for (std::size_t j = 0; j < radii.size(); ++j) {
    for (std::size_t l = 0; l < sorted_norms.size(); ++l) {
      const auto& norms = sorted_norms[l];
      const auto inside = std::upper_bound(norms.begin(), norms.end(), radii[j]) - norms.begin();
      per_lag[l] = static_cast<double>(inside) / static_cast<double>(norms.size());
    }
    masses[j] = stats::mean(per_lag);
  }
  return masses;
}

void check_lags(const Trajectory& t, std::span<const std::size_t> lags) {
  if (lags.empty()) throw ArgumentError("ball-mass curve needs at least one lag");
  for (std::size_t lag : lags) {
    if (lag == 0 || lag >= t.size()) throw ArgumentError("lag " + std::to_string(lag) + " is out of range");
  }
}

}  // namespace

BallMassCurve ball_mass_curve(const Trajectory& t, std::span<const std::size_t> lags, const RadiusGrid& radii) {
  check_lags(t, lags);
  std::vector<std::vector<double>> sorted_norms;
  for (std::size_t lag : lags) {
    auto norms = increments(t, lag).norms();
    std::sort(norms.begin(), norms.end());
    sorted_norms.push_back(std::move(norms));
  }
  return BallMassCurve{radii, masses_for(sorted_norms, radii), std::vector<std::size_t>(lags.begin(), lags.end())};
}

std::vector<BallMassCurve> anchored_ball_mass_curves(const Trajectory& t, std::span<const std::size_t> lags,
                                                     const RadiusGrid& radii, std::size_t anchors) {
  check_lags(t, lags);
  if (anchors == 0) throw ArgumentError("need at least one anchor block");
  const std::size_t max_lag = *std::max_element(lags.begin(), lags.end());
  const std::size_t starts = t.size() - max_lag;
  if (anchors > starts) throw InsufficientDataError("more anchor blocks than usable start points");
  std::vector<BallMassCurve> out;
  for (std::size_t a = 0; a < anchors; ++a) {
    const std::size_t lo = a * starts / anchors;
    const std::size_t hi = (a + 1) * starts / anchors;
    std::vector<std::vector<double>> sorted_norms;
    for (std::size_t lag : lags) {
      std::vector<double> norms;
      for (std::size_t j = lo; j < hi; ++j) norms.push_back(distance(t.point(j + lag), t.point(j)));
      std::sort(norms.begin(), norms.end());
      sorted_norms.push_back(std::move(norms));
    }
    out.push_back(BallMassCurve{radii, masses_for(sorted_norms, radii), std::vector<std::size_t>(lags.begin(), lags.end())});
  }
  return out;
}

BallMassExponent fit_ball_mass_exponent(const BallMassCurve& curve, MassWindow window) {
  if (curve.masses.size() != curve.radii.size()) throw ArgumentError("ball-mass curve has mismatched lengths");
  std::vector<double> x, y;
  for (std::size_t j = 0; j < curve.masses.size(); ++j) {
    const double m = curve.masses[j];
    if (m > 0.0 && m < 1.0 && m >= window.lo && m <= window.hi) {
      x.push_back(std::log(curve.radii[j]));
      y.push_back(std::log(m));
    }
  }
  if (x.size() < 5) {
    throw InsufficientDataError("only " + std::to_string(x.size()) + " grid points have mass inside the window");
  }
  const auto fit = stats::least_squares(x, y);
  return BallMassExponent{fit.slope, fit.r_squared, x.size()};
}

double exponent_from_ball_mass(const BallMassCurve& curve, MassWindow window) {
  return fit_ball_mass_exponent(curve, window).alpha;
}

namespace {

// log2|v| split into an exact integer exponent and a mantissa term, so that
// scaling by powers of two (and negation) cancels exactly in the estimator.
struct LogMoments {
  double mantissa_sum = 0.0;
  std::int64_t exponent_sum = 0;
  std::int64_t count = 0;
  std::size_t zeros = 0;

  void add(double v) {
    if (v == 0.0) {
      ++zeros;
      return;
    }
    int e = 0;
    const double m = std::frexp(std::abs(v), &e);
    mantissa_sum += std::log2(m);
    exponent_sum += e;
    ++count;
  }
};

}  // namespace

StableIndexResult stable_index(std::span<const double> samples, std::size_t block_size) {
  if (block_size < 2) throw ArgumentError("stable-index block size must be at least 2");
  if (samples.size() < 10 * block_size) {
    throw InsufficientDataError("stable index needs at least " + std::to_string(10 * block_size) + " samples, got " +
                                std::to_string(samples.size()));
  }
  const std::size_t blocks = samples.size() / block_size;
  const std::size_t used = blocks * block_size;
  LogMoments single, summed;
  for (std::size_t i = 0; i < used; ++i) {
    if (!std::isfinite(samples[i])) throw ArgumentError("stable-index samples must be finite");
    single.add(samples[i]);
  }
  for (std::size_t b = 0; b < blocks; ++b) {
    double s = 0.0;
    for (std::size_t k = 0; k < block_size; ++k) s += samples[b * block_size + k];
    summed.add(s);
  }
  if (single.count == 0 || summed.count == 0) throw DegenerateError("all stable-index samples are zero");

  // mean log2|Y| - mean log2|X|; the integer parts are combined exactly.
  const double exponent_part =
      static_cast<double>(summed.exponent_sum * single.count - single.exponent_sum * summed.count) /
      (static_cast<double>(summed.count) * static_cast<double>(single.count));
  const double mantissa_part = summed.mantissa_sum / static_cast<double>(summed.count) -
                               single.mantissa_sum / static_cast<double>(single.count);
  const double inverse = (exponent_part + mantissa_part) / std::log2(static_cast<double>(block_size));

  StableIndexResult r;
  r.alpha_hat = inverse > 0.5 ? 1.0 / inverse : 2.0;
  r.block_size = block_size;
  r.dropped_zeros = single.zeros + summed.zeros;
  return r;
}

StableIndexResult layerwise_stable_index(const Trajectory& t, const std::vector<std::vector<std::size_t>>& blocks,
                                         std::size_t block_size) {
  if (blocks.empty()) throw ArgumentError("need at least one coordinate block");
  std::vector<int> seen(t.dim(), 0);
  for (const auto& block : blocks) {
    if (block.empty()) throw ArgumentError("coordinate blocks must be nonempty");
    for (std::size_t c : block) {
      if (c >= t.dim()) throw ArgumentError("coordinate " + std::to_string(c) + " is out of range");
      if (seen[c]++) throw ArgumentError("coordinate " + std::to_string(c) + " appears in more than one block");
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw ArgumentError("coordinate blocks do not cover every coordinate");
  }
  const IncrementSeries inc = increments(t, 1);
  StableIndexResult out;
  out.block_size = block_size;
  for (const auto& block : blocks) {
    std::vector<double> pooled;
    pooled.reserve(block.size() * inc.size());
    for (std::size_t c : block) {
      for (std::size_t j = 0; j < inc.size(); ++j) pooled.push_back(inc.delta(j)[c]);
    }
    const auto r = stable_index(pooled, block_size);
    out.per_block.push_back(r.alpha_hat);
    out.dropped_zeros += r.dropped_zeros;
  }
  out.alpha_hat = stats::median(out.per_block);
  return out;
}

}  // namespace tailchain
