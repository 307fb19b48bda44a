#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace coat {

/// Stream derivation for per-repetition generators. Advancing the state and
/// hashing it gives well-separated 64-bit seeds even for adjacent stream ids.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seedable generator "mt19937_64/bm1": the engine is the standard-mandated
/// mt19937_64 bit stream, uniforms take the top 53 bits, and gaussians use
/// Box-Muller with a cached second draw. All three pieces are fixed by this
/// header, so identical (seed, stream) pairs reproduce byte-identical draws
/// on any conforming platform.
class Rng {
 public:
  Rng(std::uint64_t base_seed, std::uint64_t stream) {
    std::uint64_t s = base_seed;
    (void)splitmix64(s);
    s ^= 0x6a09e667f3bcc909ULL * (stream + 1);
    engine_.seed(splitmix64(s));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw, Box-Muller pair cached across calls.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // Guard log(0); the offset keeps u1 in (0, 1].
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace coat
