#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace anys {

// All randomness in the library flows through this generator. The engine is
// std::mt19937_64, whose output sequence is fixed by the standard; the
// distributions below are hand-rolled because the <random> distributions are
// implementation-defined and would make results differ between toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound), unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller.
  double normal();

  /// k distinct values from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 mixing step; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for sub-stream `stream` of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace anys
