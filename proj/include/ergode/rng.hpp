#pragma once

#include <array>
#include <cstdint>

namespace ergode {

// Fixed RNG for the simulation engine: xoshiro256++ streams, one per path,
// with state expanded by splitmix64 from a per-path seed
//
//     stream_seed = mix64(seed + (path_index + 1) * 0x9e3779b97f4a7c15)
//
// where mix64 is the splitmix64 finalizer. This is the documented mixing
// function behind the (seed, path_index) -> stream contract; reports name the
// generator as "xoshiro256++".

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256PlusPlus {
 public:
  static constexpr const char* kName = "xoshiro256++";

  Xoshiro256PlusPlus(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 sm(mix64(seed + (stream + 1) * 0x9e3779b97f4a7c15ULL));
    for (auto& word : state_) word = sm.next();
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next() {
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

  // Uniform draw in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace ergode
