#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ract {

inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Deterministic xoshiro256++ stream with its own normal/uniform samplers.
/// The output sequence is pinned by this implementation, not by libc, so
/// identical seeds give identical draws everywhere.
class RngStream {
 public:
  explicit RngStream(uint64_t seed = 0) { reseed(seed); }

  void reseed(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
    have_spare_ = false;
    spare_ = 0.0;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4] = {};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Independent named substream of a master seed. Toggling consumers of one
/// stream (e.g. the attack) never desynchronizes the others.
inline RngStream named_stream(uint64_t master_seed, std::string_view name) {
  uint64_t x = master_seed ^ fnv1a64(name);
  return RngStream(splitmix64(x));
}

/// Indexed variant for per-episode streams.
inline RngStream named_stream(uint64_t master_seed, std::string_view name, uint64_t index) {
  uint64_t x = master_seed ^ fnv1a64(name) ^ (0x9e3779b97f4a7c15ull * (index + 1));
  return RngStream(splitmix64(x));
}

}  // namespace ract
