// Randomness used by the simulator.
//
// Every probabilistic decision in a run (source masks, Born-rule outcomes,
// randomized tamper rules) goes through an OutcomeSource. Sampling runs use a
// RandomStream; exact analysis substitutes a branch cursor that walks every
// outcome instead (see enumerate.hpp).
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qanon {

class OutcomeSource {
 public:
  virtual ~OutcomeSource() = default;

  /// Returns 1 with probability `p_one`, 0 otherwise.
  virtual int draw(double p_one) = 0;

  int fair_bit() { return draw(0.5); }
};

/// Counter-based generator: output k is a pure function of (seed, k), so a
/// trial seeded with `seed + t` is reproducible on its own.
class RandomStream final : public OutcomeSource {
 public:
  explicit RandomStream(std::uint64_t seed) : key_(mix(seed)) {}

  std::uint64_t next_u64() { return mix(key_ + kGamma * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate (Box-Muller, one value per call).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  int draw(double p_one) override {
    if (p_one <= 0.0) return 0;
    if (p_one >= 1.0) return 1;
    return uniform() < p_one ? 1 : 0;
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qanon
