#pragma once

#include <string>
#include <vector>

#include "scanpath/model.hpp"
#include "scanpath/schedule.hpp"
#include "scanpath/training.hpp"

namespace scanpath::testing {

/// Edit distance by memoized recursion on suffixes.
int levenshtein_oracle(const std::vector<int>& a, const std::vector<int>& b);

/// Mean and variance of z_{t-1} given z_t and x0 by integrating Bayes' rule
/// numerically: prior N(sqrt(ab_prev) x0, 1 - ab_prev), likelihood
/// N(z_t; sqrt(alpha_t) z_{t-1}, 1 - alpha_t).
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments posterior_by_quadrature(double x0, double z_t, double alpha_t, double alpha_bar_prev);

/// Overwrites every trainable tensor with N(0, std^2) draws.
void randomize(ModelParams& params, double std, std::uint64_t seed);

struct GradCheck {
  double worst_relative = 0.0;
  std::string worst_tensor;
  std::size_t checked = 0;
};

/// Compares instance_loss gradients with central differences over every
/// trainable element. An element passes when |a - n| <= tol * max(|a|, |n|)
/// or |a - n| <= abs_floor; worst_relative is the largest ratio among the
/// elements outside the floor.
GradCheck gradient_check(ModelParams params, const EncodedInstance& inst, int t, double weight,
                         const NoiseSchedule& sched, const NoiseDraw& noise, double h, double abs_floor);

}  // namespace scanpath::testing
