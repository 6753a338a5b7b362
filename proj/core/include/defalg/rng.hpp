#pragma once

#include <cstdint>
#include <random>

namespace defalg {

// Deterministic uniform variates. std::uniform_real_distribution is not
// bit-exact across standard library implementations, so samples are drawn
// directly from the engine's 64-bit output: the top 53 bits scaled to [0,1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace defalg
