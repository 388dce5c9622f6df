#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace uimvdr {

// Portable seeded generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; every derived draw below is computed
// here rather than through <random> distributions, whose algorithms are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) from the top 53 bits of one engine output.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // [0, n), one engine output.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }
  // Standard normal via Box-Muller, two engine outputs per draw.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace uimvdr
