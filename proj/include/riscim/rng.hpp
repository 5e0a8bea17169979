#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "riscim/common.hpp"

namespace riscim {

/// Identifies the deterministic stream a randomized object was drawn from.
struct SeedRecord {
  std::uint64_t root_seed = 0;
  std::uint64_t stream = 0;

  bool operator==(const SeedRecord&) const = default;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a 64-bit, used to derive content-keyed substreams and config hashes.
inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

/// Deterministic random source. mt19937_64 is fully specified by the
/// standard and the uniform/gaussian mappings below avoid the
/// implementation-defined std <random> distributions, so identical seeds
/// give bit-identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Independent stream derived from (root, stream); stable across runs.
  static Rng for_stream(const SeedRecord& rec) {
    return Rng(splitmix64(splitmix64(rec.root_seed) ^ splitmix64(rec.stream + 0x51ED2701ull)));
  }
  static Rng for_stream(std::uint64_t root, std::uint64_t stream) {
    return for_stream(SeedRecord{root, stream});
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// +1 or -1 with equal probability.
  double sign() { return (next_u64() & 1ull) ? 1.0 : -1.0; }

  /// Standard normal pair via Box-Muller.
  std::pair<double, double> gaussian_pair() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
  }

  /// One circular complex gaussian sample with E|z|^2 = 1.
  Complex complex_gaussian() {
    auto [a, b] = gaussian_pair();
    return Complex(a, b) * std::sqrt(0.5);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace riscim
