#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace polopt {

/// Counter-based splittable generator (splitmix64 core). Stream i of a batch
/// depends only on (seed, i), so batch members can be drawn independently and
/// in parallel while staying bit-identical to sequential evaluation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // Guard against log(0).
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Derives the seed of stream `index` from a base seed. Mixing both words
/// through the splitmix64 finalizer keeps nearby (seed, index) pairs
/// statistically unrelated.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mixer(seed ^ (0x6a09e667f3bcc909ULL + index * 0x3c6ef372fe94f82aULL));
  mixer.next();
  return mixer.next();
}

}  // namespace polopt
