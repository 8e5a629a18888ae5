#pragma once

#include <cstdint>
#include <random>

namespace lexssp {

// Deterministic RNG wrapper. The uniform double mapping is spelled out
// rather than delegating to std::uniform_real_distribution, whose output
// is not pinned across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; derives independent per-sample seeds from a root
// seed so sample i's draws do not depend on how many draws sample i-1 used.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace lexssp
