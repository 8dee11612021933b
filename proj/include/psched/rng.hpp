#pragma once

#include <cstdint>
#include <random>

namespace psched {

// Deterministic RNG wrapper. All distribution mapping is done by hand so that
// a given seed produces the same stream on every platform/stdlib.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double unit() { return (gen_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Uniform integer on {lo, ..., hi} inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(unit() * (hi - lo + 1));
  }

  bool chance(double p) { return unit() < p; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace psched
