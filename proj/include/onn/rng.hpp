#pragma once

// Portable deterministic random numbers for corruption and trial seeding.
//
// Generator: SplitMix64. State advances by the constant 0x9e3779b97f4a7c15;
// the output is the state passed through
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   z =  z ^ (z >> 31)
// Bounded draws take the high 64 bits of the 128-bit product draw * bound.
// Every implementation following these three rules reproduces trials bit for
// bit, independent of platform or standard library.

#include <cstdint>

namespace onn {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

/// Seed for one benchmark trial: each coordinate is folded into the master
/// seed through one generator draw, so neighbouring trials are decorrelated.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t pattern, std::uint64_t level,
                                 std::uint64_t trial) {
  std::uint64_t s = SplitMix64(master).next();
  s = SplitMix64(s ^ pattern).next();
  s = SplitMix64(s ^ level).next();
  return SplitMix64(s ^ trial).next();
}

}  // namespace onn
