#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace puorl {

// Counter-based generator (SplitMix64 run in counter mode).
//
// The n-th output is a pure function of (key, n), so a stream is fully
// determined by its key and can be replayed from any point. Child streams are
// derived by key derivation only:
//
//   child.key = finalize(key ^ finalize(stream ^ kChildSalt))
//
// so children never share state with their parent. Distinct stream ids give
// statistically independent streams; the same id always gives the same child.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(finalize(seed ^ kSeedSalt)) {}

  Rng child(std::uint64_t stream) const {
    return from_key(finalize(key_ ^ finalize(stream ^ kChildSalt)));
  }

  std::uint64_t next_u64() {
    return finalize(key_ + (++counter_) * kGamma);
  }

  // Unbiased integer in [0, n) via 128-bit multiply rejection.
  std::uint64_t below(std::uint64_t n) {
    using u128 = unsigned __int128;
    std::uint64_t x = next_u64();
    u128 m = static_cast<u128>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        x = next_u64();
        m = static_cast<u128>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  float uniformf() { return static_cast<float>(next_u64() >> 40) * 0x1.0p-24f; }

  float uniform_in(float lo, float hi) { return lo + (hi - lo) * uniformf(); }

  // Standard normal via Box-Muller; the paired draw is cached per object.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  float normalf() { return static_cast<float>(normal()); }

  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const std::uint64_t j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kSeedSalt = 0x8C2F9D5343B3A71Bull;
  static constexpr std::uint64_t kChildSalt = 0x5851F42D4C957F2Dull;

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static Rng from_key(std::uint64_t key) {
    Rng r(0);
    r.key_ = key;
    r.counter_ = 0;
    r.has_spare_ = false;
    return r;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace puorl
