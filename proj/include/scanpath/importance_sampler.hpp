#pragma once

#include <array>
#include <vector>

namespace scanpath {

class Rng;

/// Loss-aware timestep sampler over t = 0..T. Until every step has a full
/// history, steps are drawn uniformly; afterwards with probability
/// proportional to the root mean square of the last kHistory losses, mixed
/// with a small uniform floor so every step keeps positive probability.
class ImportanceSampler {
 public:
  static constexpr int kHistory = 10;
  static constexpr double kUniformFloor = 1e-3;

  explicit ImportanceSampler(int t_max);

  int t_max() const { return static_cast<int>(counts_.size()) - 1; }
  int buckets() const { return static_cast<int>(counts_.size()); }
  bool warmed_up() const;

  /// Current sampling distribution over t = 0..T.
  std::vector<double> probabilities() const;

  int sample(Rng& rng) const;

  /// Importance weight 1 / (buckets * p(t)), so uniform sampling weighs 1.
  double weight(int t) const;

  void update(int t, double loss);

 private:
  std::vector<std::array<double, kHistory>> squared_;
  std::vector<int> counts_;  // total updates per t
};

}  // namespace scanpath
