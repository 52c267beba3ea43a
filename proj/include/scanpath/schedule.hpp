#pragma once

#include <string>
#include <vector>

#include "scanpath/tensor.hpp"

namespace scanpath {

enum class ScheduleKind { Sqrt, Linear, Cosine, TruncCosine, TruncLinear };

ScheduleKind parse_schedule_kind(const std::string& name);
std::string to_string(ScheduleKind kind);

/// Per-step noise levels for t = 0..T. Entry 0 is the embedding step: beta(0)
/// is the variance used to sample z_0 around Emb(x), and alpha_bar(0) =
/// 1 - beta(0). For t >= 1, alpha_bar(t) = alpha(t) * alpha_bar(t - 1).
class NoiseSchedule {
 public:
  static constexpr double kMaxBeta = 0.999;
  static constexpr double kMinBeta = 1e-8;
  static constexpr double kDefaultSqrtOffset = 1e-4;

  NoiseSchedule(ScheduleKind kind, int t_max, double s = kDefaultSqrtOffset);

  ScheduleKind kind() const { return kind_; }
  int t_max() const { return t_max_; }
  double offset() const { return s_; }

  double beta(int t) const { return beta_.at(static_cast<std::size_t>(t)); }
  double alpha(int t) const { return alpha_.at(static_cast<std::size_t>(t)); }
  double alpha_bar(int t) const { return alpha_bar_.at(static_cast<std::size_t>(t)); }

  const std::vector<double>& betas() const { return beta_; }
  const std::vector<double>& alphas() const { return alpha_; }
  const std::vector<double>& alpha_bars() const { return alpha_bar_; }

 private:
  ScheduleKind kind_;
  int t_max_;
  double s_;
  std::vector<double> beta_, alpha_, alpha_bar_;
};

NoiseSchedule build_schedule(ScheduleKind kind, int t_max, double s = NoiseSchedule::kDefaultSqrtOffset);

/// Closed-form noising of an (un-noised) component:
/// sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps, on rows where `rows`
/// is true; other rows are returned unchanged. Requires 1 <= t <= T.
Matrix q_sample(const Matrix& x0, int t, const Matrix& eps, const NoiseSchedule& sched,
                const std::vector<bool>& rows = {});

struct Posterior {
  Matrix mean;
  double variance = 0.0;
};

/// Mean and variance of q(z_{t-1} | z_t, z_0) for 2 <= t <= T.
Posterior posterior_params(const Matrix& z_t, const Matrix& z0_hat, int t, const NoiseSchedule& sched);

}  // namespace scanpath
