#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mmfusion {

/// Seeded generator with fully specified derived distributions, so outputs do
/// not depend on the standard library's distribution implementations.
///
/// Engine: std::mt19937_64 (bit-exact by the standard).
/// uniform(): top 53 bits / 2^53, in [0, 1).
/// normal(): Box-Muller, sqrt(-2 ln(1-u1)) * cos(2 pi u2); the
///           sine twin is discarded so every call consumes two draws.
/// index(n): rejection sampling on the raw 64-bit output.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t index(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed (splitmix64 finalizer over seed ^ salt).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace mmfusion
