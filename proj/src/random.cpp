#include "tailchain/random.hpp"

#include <cmath>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace tailchain {

double Rng::uniform_open() {
  // (k + 0.5) / 2^53 for a 53-bit integer k never hits 0 or 1.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double Rng::exponential() {
  boost::random::exponential_distribution<double> dist(1.0);
  return dist(engine_);
}

double Rng::log_gamma(double shape) {
  if (shape >= 1.0) {
    boost::random::gamma_distribution<double> dist(shape, 1.0);
    return std::log(dist(engine_));
  }
  // G(shape) = G(shape + 1) * U^(1/shape), evaluated in log space so that
  // tiny shapes do not underflow.
  boost::random::gamma_distribution<double> dist(shape + 1.0, 1.0);
  const double g = dist(engine_);
  return std::log(g) + std::log(uniform_open()) / shape;
}

}  // namespace tailchain
