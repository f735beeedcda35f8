#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace prs {

// Deterministic draw stream. The engine is std::mt19937_64, whose raw output
// sequence is fixed by the standard; the uniform/normal mappings live here
// because <random> distributions are implementation-defined and would break
// reproducibility of emitted scenes.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Standard normal via the Marsaglia polar method; the second value of each
  // pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double v1 = 0.0, v2 = 0.0, s = 0.0;
    do {
      v1 = uniform(-1.0, 1.0);
      v2 = uniform(-1.0, 1.0);
      s = v1 * v1 + v2 * v2;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v2 * f;
    has_spare_ = true;
    return v1 * f;
  }

  // Hash-combines a seed with a stream label. Object streams derived this way
  // are independent of each other and of how many streams exist, so appending
  // a declaration never perturbs draws of earlier objects.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace prs
