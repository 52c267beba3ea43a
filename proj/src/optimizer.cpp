#include "scanpath/optimizer.hpp"

#include <cmath>

namespace scanpath {

AdamW::AdamW(const ModelParams& like, AdamWConfig config) : config_(config) {
  like.visit_trainable([&](const std::string&, const Matrix& m) {
    m_.push_back(Matrix::Zero(m.rows(), m.cols()));
    v_.push_back(Matrix::Zero(m.rows(), m.cols()));
  });
}

void AdamW::step(ModelParams& params, const ModelParams& grads) {
  ++t_;
  std::vector<const Matrix*> g;
  grads.visit_trainable([&](const std::string&, const Matrix& m) { g.push_back(&m); });
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  const double lr = config_.lr;
  std::size_t i = 0;
  params.visit_trainable([&](const std::string&, Matrix& p) {
    const Matrix& gi = *g[i];
    Matrix& m = m_[i];
    Matrix& v = v_[i];
    m = config_.beta1 * m + (1.0 - config_.beta1) * gi;
    v = config_.beta2 * v + (1.0 - config_.beta2) * gi.cwiseProduct(gi);
    if (config_.weight_decay != 0.0) p *= 1.0 - lr * config_.weight_decay;
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.eps);
    ++i;
  });
}

double global_norm(const ModelParams& grads) {
  double sq = 0.0;
  grads.visit_trainable([&](const std::string&, const Matrix& m) { sq += m.squaredNorm(); });
  return std::sqrt(sq);
}

double clip_by_global_norm(ModelParams& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    grads.visit_trainable([&](const std::string&, Matrix& m) { m *= s; });
  }
  return norm;
}

}  // namespace scanpath
