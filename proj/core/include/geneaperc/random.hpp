#pragma once

#include <cstdint>
#include <random>

namespace geneaperc {

using Seed = std::uint64_t;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Replicate k of a plan always runs
/// on derive_seed(master, k), whatever the worker count.
constexpr Seed derive_seed(Seed master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Maps 64 random bits to (0, 1]. Zero is excluded so that `u <= 0` never
/// holds and `u <= 1` always does.
constexpr double bits_to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on (0, 1].
  double uniform() { return bits_to_unit(engine_()); }

  bool bernoulli(double p) { return uniform() <= p; }

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Lemire's rejection keeps the draw unbiased and portable.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = engine_();
      const unsigned __int128 wide = static_cast<unsigned __int128>(x) * n;
      if (static_cast<std::uint64_t>(wide) >= threshold) {
        return static_cast<std::uint64_t>(wide >> 64);
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace geneaperc
