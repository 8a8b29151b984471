#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace aftnet {

// Seedable generator with explicit child-stream derivation, used everywhere
// randomness is needed so results are identical across platforms. The engine
// is std::mt19937_64 (its output sequence is fixed by the standard) and all
// distribution transforms are written out explicitly because the standard
// library's distributions are implementation-defined.
//
// Stream conventions:
//   child(k) derives an independent stream via splitmix64 mixing;
//   synthetic data uses child(1)=design, child(2)=truth, child(3)=times,
//   child(4)=censoring; replication r of a run seeded with s uses s + r.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed)
      : seed_base_(mix(seed)), engine_(mix(mix(seed))) {}

  SplitRng child(std::uint64_t stream) const {
    return SplitRng(seed_base_ + 0x9E3779B97F4A7C15ULL * (stream + 1));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Strictly inside (0, 1).
  double uniform01() {
    const std::uint64_t x = next_u64() >> 12;  // 52 bits
    return (static_cast<double>(x) + 0.5) * 0x1.0p-52;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Box-Muller with a cached spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  // splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_base_ = 0;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace aftnet
