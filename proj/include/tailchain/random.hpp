#pragma once

#include <cstdint>
#include <random>

namespace tailchain {

// 64-bit avalanche mixer (the splitmix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Reproducible seed. Replicate i of base b uses mix64(b ^ mix64(i)), so
/// derived seeds can be chained: seed.derive(grid).derive(replicate).
struct Seed {
  std::uint64_t base = 0;

  constexpr Seed derive(std::uint64_t index) const noexcept {
    return Seed{mix64(base ^ mix64(index))};
  }
  constexpr bool operator==(const Seed&) const = default;
};

/// Random stream for one seed. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the variate transforms live in this
/// library (and in Boost.Random) so draws are identical across platforms.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(Seed seed) : engine_(mix64(seed.base)) {}

  engine_type& engine() noexcept { return engine_; }

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform_open();
  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }
  double normal();
  double exponential();
  /// log of a Gamma(shape, 1) draw; stays finite for very small shapes.
  double log_gamma(double shape);

 private:
  engine_type engine_;
};

}  // namespace tailchain
