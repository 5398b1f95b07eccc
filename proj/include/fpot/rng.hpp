#pragma once

#include <cmath>
#include <cstdint>

namespace fpot {

// splitmix64 (Vigna). Fixed here so golden tests and disorder realizations
// are stable across platforms and standard-library versions.
inline std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64_finalize(state_);
  }

  // uniform in [0, 1), 53-bit mantissa
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Substream id packs (realization, role U=0/V=1, quench segment) injectively;
// the multiply by the odd golden-ratio constant is a bijection mod 2^64, so
// distinct tuples never collide for a fixed master seed.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t realization,
                                    std::uint64_t role, std::uint64_t segment) {
  const std::uint64_t id = (realization << 9) | ((role & 1ULL) << 8) | (segment & 0xFFULL);
  return splitmix64_finalize(master + 0x9E3779B97F4A7C15ULL * (id + 1));
}

// Marsaglia polar Gaussian over a SplitMix64 stream. The method is pinned
// (not std::normal_distribution) so identical seeds give identical fields
// on every implementation.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * rng_.next_unit() - 1.0;
      v = 2.0 * rng_.next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fpot
