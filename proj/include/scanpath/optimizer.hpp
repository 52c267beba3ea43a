#pragma once

#include <vector>

#include "scanpath/model.hpp"

namespace scanpath {

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Adam with decoupled weight decay; the decay term is scaled by lr.
class AdamW {
 public:
  AdamW(const ModelParams& like, AdamWConfig config);

  void step(ModelParams& params, const ModelParams& grads);
  long steps() const { return t_; }
  const AdamWConfig& config() const { return config_; }

 private:
  AdamWConfig config_;
  std::vector<Matrix> m_, v_;
  long t_ = 0;
};

double global_norm(const ModelParams& grads);

/// Rescales gradients so their global L2 norm is at most max_norm. Returns
/// the norm before clipping.
double clip_by_global_norm(ModelParams& grads, double max_norm);

}  // namespace scanpath
