#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace occmix {

namespace detail {

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Combine a master seed with stream indices into an independent substream
// seed. Every (seed, indices...) pair maps to a distinct stream, which makes
// parallel simulation deterministic regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = seed ^ 0x6a09e667f3bcc909ull;
  detail::splitmix64_step(h);
  for (std::uint64_t k : keys) {
    h ^= k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    detail::splitmix64_step(h);
  }
  return detail::splitmix64_step(h);
}

// xoshiro256++ with splitmix64 seeding. Self-contained so that simulated
// streams do not depend on standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = detail::splitmix64_step(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // uniform in [0, 1)
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1), safe as a quantile-function argument
  double next_double_open() {
    return ((next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  bool bernoulli(double p) { return next_double() < p; }

  // Poisson draw: product-of-uniforms inversion for small means, Hormann's
  // transformed rejection (PTRS) otherwise.
  long poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 10.0) {
      const double limit = std::exp(-lambda);
      long k = 0;
      double prod = next_double();
      while (prod > limit) {
        prod *= next_double();
        ++k;
      }
      return k;
    }
    return poisson_ptrs(lambda);
  }

 private:
  long poisson_ptrs(double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = next_double() - 0.5;
      const double v = next_double_open();
      const double us = 0.5 - std::abs(u);
      const long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + lambda + 0.43));
      if (us >= 0.07 && v <= v_r) return k;
      if (k < 0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          k * loglam - lambda - std::lgamma(k + 1.0)) {
        return k;
      }
    }
  }

  std::uint64_t state_[4];
};

}  // namespace occmix
