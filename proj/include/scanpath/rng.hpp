#pragma once

#include <cstdint>
#include <random>

namespace scanpath {

// Seeded generator with platform-independent derived distributions.
// std::mt19937_64 output is fixed by the standard; the distribution
// adaptors in <random> are not, so the few we need are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller; caches the second variate.
  double normal();

  // Child generator for an independent stream (e.g. one per sentence).
  Rng fork(std::uint64_t stream) const;

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace scanpath
