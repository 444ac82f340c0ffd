#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace unbiascov::rng {

// SplitMix64 step: advances the state by the golden-gamma and returns the
// finalized output word.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// xoshiro256++ stream keyed by (seed, purpose, index) through a SplitMix64
// chain, so every Monte Carlo realization owns an independent sequence and the
// output never depends on standard-library distribution internals.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    std::uint64_t chain = seed;
    (void)splitmix64_next(chain);
    chain ^= purpose;
    (void)splitmix64_next(chain);
    chain ^= index;
    for (auto& word : state_) word = splitmix64_next(chain);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 0x1ULL;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl64(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53 significant bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (deterministic, spare value cached).
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));  // 1-u1 in (0, 1]
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace unbiascov::rng
