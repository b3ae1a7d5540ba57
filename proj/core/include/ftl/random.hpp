#pragma once

#include <cstdint>
#include <random>

namespace ftl {

/// Derives a per-stream seed from (base, index).
///
///   z  = base + 0x9E3779B97F4A7C15 * (index + 1)      (mod 2^64)
///   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
///   z ^= z >> 27;  z *= 0x94D049BB133111EB
///   z ^= z >> 31
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// std::mt19937_64 with uniform() = (x >> 11) * 2^-53, in [0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ftl
