#pragma once

#include <cstdint>

namespace eic {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Fixed stream ids so every consumer of one master seed draws from a
// disjoint stream. Coded-phase streams start at stream_combo and extend
// upward per scheme.
enum : std::uint64_t {
  stream_msg1 = 0,
  stream_msg2 = 1,
  stream_cache1 = 2,
  stream_cache2 = 3,
  stream_trace = 4,
  stream_combo = 5,
};

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed ^ 0x5851f42d4c957f2dull) + stream);
}

// Random access into a keyed stream. word(i) depends only on
// (seed, stream, i), so values can be regenerated in any order; decoders
// rebuild coding coefficients from the same keys the encoders used.
class KeyedBits {
 public:
  KeyedBits(std::uint64_t seed, std::uint64_t stream)
      : key_(stream_key(seed, stream)) {}

  std::uint64_t word(std::uint64_t i) const {
    return splitmix64(key_ + i * 0x9e3779b97f4a7c15ull);
  }
  bool bit(std::uint64_t i) const { return word(i) & 1; }
  double uniform(std::uint64_t i) const {
    return double(word(i) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

// Sequential generator for shuffles and one-off draws.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  // Modulo bias is below 1e-13 for the ranges used here.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace eic
