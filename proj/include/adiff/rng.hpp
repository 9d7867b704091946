#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace adiff {

/// Seedable generator whose output is identical on every platform.
///
/// The engine is std::mt19937_64 (its sequence is fixed by the standard).
/// The std:: distributions are implementation-defined, so the two draws used
/// throughout the library are derived from raw engine output here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) built from the top 53 bits of one engine call.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n), one engine call. n must be positive.
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `stream` of trial `trial` under `master`:
///   splitmix64(splitmix64(splitmix64(master) ^ trial) ^ stream)
/// Streams 0..k-1 are the k diffusions of a trial; estimator streams follow.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                    std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ trial) ^ stream);
}

}  // namespace adiff
