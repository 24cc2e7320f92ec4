#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace firecast {

// Counter-based randomness: every draw is a pure function of its inputs, so
// results do not depend on evaluation order or thread scheduling.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243F6A8885A308D3ull;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

/// Maps 64 random bits to a double uniform on [0, 1).
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double hash_uniform(std::initializer_list<std::uint64_t> parts) {
  return to_unit(hash_mix(parts));
}

/// Standard normal via Box-Muller on two derived uniforms.
inline double hash_normal(std::uint64_t key) {
  const double u1 = to_unit(splitmix64(key ^ 0x5851F42D4C957F2Dull));
  const double u2 = to_unit(splitmix64(key + 0x14057B7EF767814Full));
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Sequential stream for places where a plain generator reads better
/// (shuffles, weight init). Deterministic across platforms.
class SplitMixStream {
 public:
  explicit SplitMixStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return splitmix64(state_);
  }
  double uniform() { return to_unit(next()); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::uint64_t state_;
};

}  // namespace firecast
