#pragma once

#include <bit>
#include <cstdint>

namespace epicon {

// Deterministic splittable generator in the SplitMix64 family
// (Steele, Lea & Flood, "Fast splittable pseudorandom number generators";
// finalizer constants due to Stafford).
//
// Every (seed, stream) pair owns an independent sequence, so Monte Carlo
// trials can be replayed or reordered without touching each other's draws.
// State is two words and all operations are pure value arithmetic, which
// keeps replays bit-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : state_(mix(seed + kGolden)), gamma_(mixGamma(seed + 2 * kGolden)) {}

  // Substream for (seed, stream), e.g. one stream per trial index.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed + kGolden) ^ mix(stream + 3 * kGolden));
  }

  // Substream for (seed, a, b), e.g. (seed, grid point, trial index).
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return Rng(mix(seed + kGolden) ^ mix(a + 3 * kGolden) ^ mix(b + 5 * kGolden));
  }

  std::uint64_t nextU64() {
    state_ += gamma_;
    return mix(state_);
  }

  // Uniform double in the open interval (0, 1). Endpoints are excluded so
  // inverse-CDF sampling never lands exactly on a support boundary.
  double nextUnit() {
    return (static_cast<double>(nextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Per-stream odd increment, following the SplittableRandom recipe: a gamma
  // with too few bit transitions is mixed once more so neighbouring streams
  // do not share an orbit.
  static std::uint64_t mixGamma(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDULL;
    z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ULL;
    z = (z ^ (z >> 33)) | 1ULL;
    if (std::popcount(z ^ (z >> 1)) < 24) z ^= 0xAAAAAAAAAAAAAAAAULL;
    return z;
  }

  std::uint64_t state_;
  std::uint64_t gamma_;
};

}  // namespace epicon
