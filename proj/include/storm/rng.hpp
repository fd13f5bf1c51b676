#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace storm {

// All randomness in the library flows through this header so that sketches
// built on different machines from the same seed are bit-identical. The
// engine is std::mt19937_64 (exactly specified by the standard) and the
// uint64 -> double / Gaussian conversions are spelled out here instead of
// using std::*_distribution, whose output is implementation-defined.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed schedule: stream `index` derived from `master`. Two rounds of
// splitmix so that adjacent indices decorrelate.
inline uint64_t mix_seed(uint64_t master, uint64_t index) {
  uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

inline std::mt19937_64 make_engine(uint64_t seed) {
  uint64_t s = seed;
  return std::mt19937_64(splitmix64(s));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform in [-1, 1).
inline double uniform_sym(std::mt19937_64& eng) {
  return 2.0 * uniform01(eng) - 1.0;
}

// Standard normal via the Marsaglia polar method (no trig, so the value
// depends only on sqrt/log, which agree across the platforms we target).
class NormalSampler {
 public:
  double operator()(std::mt19937_64& eng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform_sym(eng);
      v = uniform_sym(eng);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace storm
