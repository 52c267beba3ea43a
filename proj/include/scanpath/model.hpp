#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "scanpath/denoiser.hpp"
#include "scanpath/embedding.hpp"

namespace scanpath {

struct ModelConfig {
  int max_len = 128;
  int idx_vocab = 0;  // 0 means max_len
  DenoiserConfig denoiser;
  double embedding_init_std = 1.0;

  int index_vocab() const { return idx_vocab > 0 ? idx_vocab : max_len; }
  void validate() const;
};

/// All tensors of the generator: embedding layers plus denoiser.
struct ModelParams {
  ModelConfig config;
  EmbeddingParams embedding;
  DenoiserParams denoiser;

  template <class F>
  void visit_trainable(F&& f) {
    embedding.visit_trainable(f);
    denoiser.visit(f);
  }
  template <class F>
  void visit_trainable(F&& f) const {
    embedding.visit_trainable(f);
    denoiser.visit(f);
  }

  std::size_t trainable_count() const;
};

ModelParams init_model(const ModelConfig& config, std::shared_ptr<const Matrix> frozen_table, std::uint64_t seed);

/// Trainable-shaped zeros. The frozen table is shared, not copied.
ModelParams zero_gradients(const ModelParams& params);

void add_scaled(ModelParams& into, const ModelParams& from, double scale);

}  // namespace scanpath
