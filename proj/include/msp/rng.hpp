#pragma once

#include <array>
#include <cstdint>

namespace msp {

// SplitMix64 step (Vigna). Used to expand seeds and derive substreams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding. Output is platform-independent, so
// experiment tables are reproducible byte for byte from a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64_next(s);
  }

  // Independent stream for a (seed, index) pair; index typically a trial id.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64_next(s);
    s ^= (index + 1) * 0x9E3779B97F4A7C15ull;
    std::uint64_t b = splitmix64_next(s);
    return Rng(a ^ (b + 0x632BE59BD9B4E019ull));
  }

  // Deterministic child seed for a (seed, index, salt) triple. Lets one
  // experiment seed fan out into unrelated draws (system, perturbation, rhs).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                   std::uint64_t salt = 0) {
    std::uint64_t s = seed;
    std::uint64_t out = splitmix64_next(s);
    s ^= (index + 1) * 0x9E3779B97F4A7C15ull;
    out ^= splitmix64_next(s);
    s ^= (salt + 1) * 0xD1B54A32D192ED03ull;
    out ^= splitmix64_next(s);
    return out;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace msp
