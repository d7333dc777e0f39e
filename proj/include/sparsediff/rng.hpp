#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sparsediff::rng {

// splitmix64 finalizer; bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Fold a value into a key.  Chaining folds derives child keys, so streams
// for (seed, domain, id, ...) are independent by construction.
constexpr std::uint64_t fold(std::uint64_t key, std::uint64_t v) noexcept {
  return mix64(key ^ (v + 0x517cc1b727220a95ull));
}

// Stream domains.  Keeping them in one place avoids accidental collisions
// between covariate, Brownian and replicate-level streams.
enum : std::uint64_t {
  kDomainCovariate = 0x11,
  kDomainBrownian = 0x22,
  kDomainReplicate = 0x33,
  kDomainTheta = 0x44,
  kDomainFactors = 0x55,
};

/// Counter-based stream: draw i is a pure function of (key, i).  No state is
/// mutated, so one stream can be consumed from many threads and any draw can
/// be recomputed without replaying the sequence.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  Stream derive(std::uint64_t v) const noexcept { return Stream(fold(key_, v)); }

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t bits(std::uint64_t i) const noexcept { return mix64(key_ ^ mix64(i)); }

  // Uniform on [0, 1).
  double uniform(std::uint64_t i) const noexcept {
    return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1); safe under log().
  double uniform_open(std::uint64_t i) const noexcept {
    return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes counter slots 2i and 2i+1.
  double normal(std::uint64_t i) const noexcept {
    const double u = uniform_open(2 * i);
    const double v = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::uint64_t key_;
};

inline Stream stream(std::uint64_t seed, std::uint64_t domain, std::uint64_t id = 0) {
  return Stream(fold(fold(seed, domain), id));
}

}  // namespace sparsediff::rng
