#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace datajoin {

// Deterministic 64-bit generator (splitmix64 core). std::shuffle and
// std::normal_distribution produce implementation-defined sequences, so every
// experiment draws through this class to make results reproducible from a
// single seed across toolchains. Streams for distinct purposes ("split",
// "synth", ...) are derived from the base seed so adding a draw in one place
// does not shift another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the spare value is discarded so the
  // draw count per sample is fixed.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Unbiased integer in [0, n).
  std::size_t below(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t m = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % m;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::size_t>(x % m);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  // Independent stream derived from the base seed and a purpose tag.
  Rng stream(std::string_view purpose) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : purpose) {
      h ^= static_cast<std::uint8_t>(c);
      h *= 1099511628211ULL;
    }
    return Rng(h ^ (base_ * 0x2545f4914f6cdd1dULL + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t base_seed() const { return base_; }

 private:
  std::uint64_t base_;
  std::uint64_t state_;
};

}  // namespace datajoin
