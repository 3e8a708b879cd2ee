#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace survkit {

// Stateless 64-bit mixer (splitmix64 finalizer). Used to derive independent
// seed streams so parallel tasks reproduce the sequential results bit for bit.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives the seed for sub-stream `stream` of a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

// Named top-level streams of a run's master seed.
namespace seed_stream {
inline constexpr std::uint64_t kMonteCarlo = 1;
inline constexpr std::uint64_t kNestedCv = 2;
inline constexpr std::uint64_t kTune = 3;
inline constexpr std::uint64_t kRefit = 4;
inline constexpr std::uint64_t kImportance = 5;
}  // namespace seed_stream

// Deterministic RNG built on std::mt19937_64 raw output (its sequence is
// pinned by the standard). All deriving transforms are implemented here so
// draws do not depend on implementation-defined <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); safe under log().
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer on [0, n). n must be >= 1.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  // Standard normal via Box-Muller; one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // First `count` entries of a shuffle of {0, ..., n-1}, without replacement.
  std::vector<int> sample_without_replacement(int n, int count) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < count; ++i) {
      const int j = i + static_cast<int>(uniform_below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    return pool;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace survkit
