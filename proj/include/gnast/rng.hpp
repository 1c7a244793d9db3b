#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace gnast {

// Counter-style PRNG (splitmix64). The whole state is one u64, which makes
// campaign snapshots trivially serializable and resumable bit-exactly.
// std::mt19937 & friends carry hidden, implementation-defined state, so they
// are not usable where the state must round-trip through a JSON file.
class Rng {
 public:
  Rng() : state_(0x9e3779b97f4a7c15ull) {}
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller. Uses two uniforms per draw and keeps no
  // cached tail value, so the state stays a single u64.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
  return fnv1a64(std::string_view(static_cast<const char*>(data), n));
}

// One global campaign seed fans out to per-component seeds through a fixed
// labeled hash, so each component is independently reproducible.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  Rng r(seed ^ fnv1a64(label));
  return r.next_u64();
}

}  // namespace gnast
