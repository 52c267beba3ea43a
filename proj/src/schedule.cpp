#include "scanpath/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "scanpath/error.hpp"

namespace scanpath {

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "sqrt") return ScheduleKind::Sqrt;
  if (name == "linear") return ScheduleKind::Linear;
  if (name == "cosine") return ScheduleKind::Cosine;
  if (name == "trunc_cosine") return ScheduleKind::TruncCosine;
  if (name == "trunc_linear") return ScheduleKind::TruncLinear;
  throw ConfigError("unknown schedule '" + name + "'");
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Sqrt: return "sqrt";
    case ScheduleKind::Linear: return "linear";
    case ScheduleKind::Cosine: return "cosine";
    case ScheduleKind::TruncCosine: return "trunc_cosine";
    case ScheduleKind::TruncLinear: return "trunc_linear";
  }
  return "?";
}

namespace {

double clip_beta(double b) { return std::clamp(b, NoiseSchedule::kMinBeta, NoiseSchedule::kMaxBeta); }

// Linear interpolation of beta over t = 1..T.
std::vector<double> linear_betas(int t_max, double start, double end) {
  std::vector<double> beta(static_cast<std::size_t>(t_max) + 1);
  for (int t = 1; t <= t_max; ++t) {
    const double i = t_max > 1 ? static_cast<double>(t - 1) / static_cast<double>(t_max - 1) : 0.0;
    beta[static_cast<std::size_t>(t)] = start * (1.0 - i) + end * i;
  }
  beta[0] = beta[1];
  return beta;
}

// Betas derived from an alpha-bar curve f(t): beta_0 = 1 - f(0) and
// beta_t = 1 - f(t) / f(t-1), each clipped into [kMinBeta, kMaxBeta].
std::vector<double> alpha_bar_betas(int t_max, const std::function<double(int)>& f) {
  std::vector<double> beta(static_cast<std::size_t>(t_max) + 1);
  beta[0] = clip_beta(1.0 - f(0));
  for (int t = 1; t <= t_max; ++t) {
    const double prev = f(t - 1);
    const double cur = f(t);
    const double b = prev > 0.0 ? 1.0 - cur / prev : NoiseSchedule::kMaxBeta;
    beta[static_cast<std::size_t>(t)] = clip_beta(b);
  }
  return beta;
}

}  // namespace

NoiseSchedule::NoiseSchedule(ScheduleKind kind, int t_max, double s) : kind_(kind), t_max_(t_max), s_(s) {
  if (t_max < 1) throw ConfigError("number of diffusion steps must be at least 1");
  const double total = static_cast<double>(t_max);
  switch (kind) {
    case ScheduleKind::Linear:
      beta_ = linear_betas(t_max, 1e-4, 0.02);
      break;
    case ScheduleKind::TruncLinear:
      beta_ = linear_betas(t_max, 1e-4 + 0.01, 0.02 + 0.01);
      break;
    case ScheduleKind::Sqrt:
      beta_ = alpha_bar_betas(t_max, [&](int t) { return 1.0 - std::sqrt(t / total + s); });
      break;
    case ScheduleKind::Cosine:
    case ScheduleKind::TruncCosine: {
      auto f = [&](int t) {
        const double c = std::cos((t / total + 0.008) / 1.008 * std::numbers::pi / 2.0);
        return c * c;
      };
      const double f0 = f(0);
      beta_ = alpha_bar_betas(t_max, [&](int t) { return f(t) / f0; });
      break;
    }
  }
  alpha_.resize(beta_.size());
  alpha_bar_.resize(beta_.size());
  double running = 1.0;
  for (std::size_t t = 0; t < beta_.size(); ++t) {
    alpha_[t] = 1.0 - beta_[t];
    running *= alpha_[t];
    alpha_bar_[t] = running;
  }
}

NoiseSchedule build_schedule(ScheduleKind kind, int t_max, double s) { return NoiseSchedule(kind, t_max, s); }

Matrix q_sample(const Matrix& x0, int t, const Matrix& eps, const NoiseSchedule& sched,
                const std::vector<bool>& rows) {
  if (t < 1 || t > sched.t_max())
    throw ValidationError("diffusion step " + std::to_string(t) + " outside [1, " +
                          std::to_string(sched.t_max()) + "]");
  if (eps.rows() != x0.rows() || eps.cols() != x0.cols()) throw ValidationError("noise shape mismatch");
  const double a = std::sqrt(sched.alpha_bar(t));
  const double b = std::sqrt(1.0 - sched.alpha_bar(t));
  Matrix out = x0;
  for (Eigen::Index i = 0; i < x0.rows(); ++i) {
    if (!rows.empty() && !rows[static_cast<std::size_t>(i)]) continue;
    out.row(i) = a * x0.row(i) + b * eps.row(i);
  }
  return out;
}

Posterior posterior_params(const Matrix& z_t, const Matrix& z0_hat, int t, const NoiseSchedule& sched) {
  if (t < 2 || t > sched.t_max())
    throw ValidationError("posterior step " + std::to_string(t) + " outside [2, " +
                          std::to_string(sched.t_max()) + "]");
  const double alpha = sched.alpha(t);
  const double ab = sched.alpha_bar(t);
  const double ab_prev = sched.alpha_bar(t - 1);
  const double denom = 1.0 - ab;
  Posterior p;
  p.mean = (std::sqrt(alpha) * (1.0 - ab_prev) / denom) * z_t + (std::sqrt(ab_prev) * (1.0 - alpha) / denom) * z0_hat;
  p.variance = (1.0 - alpha) * (1.0 - ab_prev) / denom;
  return p;
}

}  // namespace scanpath
