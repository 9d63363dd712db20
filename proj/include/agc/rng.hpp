#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace agc {

/// splitmix64 finalizer. Used for deriving sub-stream seeds from a master
/// seed so that, e.g., iteration t of the driver sees a stable seed no
/// matter how many iterations run before or after it.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic seed for sub-stream `stream` of master seed `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::uint64_t stream) noexcept {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
}

/// Seeded random generator with the variate transforms pinned here.
///
/// The core stream is std::mt19937_64, whose output sequence is fully
/// specified by the standard. The uniform/normal/integer transforms are
/// implemented explicitly instead of via std::*_distribution, whose output
/// differs between standard library implementations; this keeps generated
/// fixtures stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, so unbiased and
  /// implementation-independent. n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached, so draws come in a fixed stream order.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace agc
