#pragma once

#include <cstdint>
#include <random>

namespace flocksim {

/// Uniform doubles from the upper 53 bits of mt19937_64 output. The engine's
/// output sequence is pinned by the standard, so draws are portable across
/// platforms, unlike std::uniform_real_distribution.
class U53Rng {
  public:
    explicit U53Rng(std::uint64_t seed) : engine_(seed) {}
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    std::uint64_t next_u64() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace flocksim
