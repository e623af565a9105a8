#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tswlad {

/// Seeded random stream with a fixed draw count per primitive.
///
/// Every gaussian() consumes exactly two uniform draws (Box-Muller without
/// caching), so a trajectory consumes a predictable number of engine outputs
/// per step and replays bit-exactly from the same seed.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw; always consumes two uniforms.
  double gaussian() {
    const double u1 = uniform01(); // 1 - u1 in (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(two_pi * u2);
  }

private:
  static constexpr double two_pi = 6.283185307179586476925286766559;
  std::mt19937_64 engine_;
};

} // namespace tswlad
