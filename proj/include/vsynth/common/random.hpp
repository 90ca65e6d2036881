#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vsynth {

/// Seeded generator with platform-independent draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Bounded integers and reals are derived here rather than through
/// the <random> distributions, whose algorithms vary between standard
/// libraries and would break byte-identical outputs across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 bits of precision.
  double uniform();

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; combines two values into a well-mixed seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Stable 64-bit seed from arbitrary text (SHA-256 prefix).
std::uint64_t seed_from(std::string_view text);

}  // namespace vsynth
