#pragma once

#include <cstdint>
#include <random>

namespace ppl {

using RngSeed = std::uint64_t;

// Derives an independent child seed from a parent seed and a stream id
// (splitmix64 finalizer over the combined words).
RngSeed derive_seed(RngSeed seed, std::uint64_t stream);
RngSeed derive_seed(RngSeed seed, std::uint64_t stream_a, std::uint64_t stream_b);

// 64-bit Mersenne twister with convenience draws. Satisfies
// UniformRandomBitGenerator so it composes with <random> distributions.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(RngSeed seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t uniform_index(std::uint64_t n);
  std::uint64_t poisson(double mean);
  double normal();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ppl
