#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace mhfc {

// Deterministic random stream (splitmix64 core). The standard <random>
// distributions are implementation-defined, so reproducibility across
// standard libraries — and the jobs-count invariance of experiment runs —
// requires owning both the generator and the draw algorithms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  // Stream for episode `index` under `master` seed. Independent per index,
  // so episodes can run concurrently in any order with identical results.
  static RandomStream derived(std::uint64_t master, std::uint64_t index) {
    return RandomStream(mix(mix(master) ^ mix(index + 0x9E3779B97F4A7C15ULL)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix_raw(state_);
  }

  // Uniform integer in [0, n), n >= 1. Rejection sampling: unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via the Marsaglia polar method (sqrt/log only).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * unit() - 1.0;
      v = 2.0 * unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // Fisher–Yates over the first k positions of v (draw-order semantics:
  // v[0..k) are the chosen elements, in the order they were drawn).
  template <typename T>
  void partial_shuffle(std::vector<T>& v, std::size_t k) {
    const std::size_t n = v.size();
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(v[i], v[j]);
    }
  }

 private:
  static std::uint64_t mix_raw(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t mix(std::uint64_t z) {
    return mix_raw(z + 0x9E3779B97F4A7C15ULL);
  }

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mhfc
