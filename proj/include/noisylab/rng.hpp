#pragma once

#include <array>
#include <cstdint>

namespace noisylab {

// xoshiro256** seeded through SplitMix64. Every draw used by the library
// goes through this type so that label corruption, initialization and
// shuffling are bit-stable across compilers and standard libraries
// (std::*_distribution output is implementation-defined).
//
//   uniform()      = (next() >> 11) * 2^-53          in [0, 1)
//   uniform_int(n) = next() % n after rejecting the top partial block, in [0, n)
//   normal()       = Box-Muller on (1 - uniform(), uniform()), both outputs used
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi);
  std::uint64_t uniform_int(std::uint64_t n);
  double normal();

 private:
  std::array<std::uint64_t, 4> state_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Independent stream seed for (seed, stream); used e.g. for seed ⊕ epoch.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace noisylab
