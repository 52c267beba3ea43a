#include "scanpath/model.hpp"

#include <vector>

#include "scanpath/error.hpp"
#include "scanpath/rng.hpp"

namespace scanpath {

void ModelConfig::validate() const {
  denoiser.validate();
  if (max_len < 6) throw ConfigError("max length must be at least 6");
  if (index_vocab() < max_len) throw ConfigError("word-index vocabulary must cover the max length");
}

std::size_t ModelParams::trainable_count() const {
  std::size_t n = 0;
  visit_trainable([&](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

ModelParams init_model(const ModelConfig& config, std::shared_ptr<const Matrix> frozen_table, std::uint64_t seed) {
  config.validate();
  if (!frozen_table) throw ConfigError("frozen token table required");
  Rng rng(seed);
  const int d = config.denoiser.hidden_dim;
  ModelParams p;
  p.config = config;
  p.embedding.idx_table = random_normal(config.index_vocab(), d, config.embedding_init_std, rng);
  p.embedding.pos_table = random_normal(config.max_len, d, config.embedding_init_std, rng);
  p.embedding.proj_weight = random_normal(frozen_table->cols(), d, 0.02, rng);
  p.embedding.proj_bias = Matrix::Zero(1, d);
  p.embedding.frozen = std::move(frozen_table);
  p.denoiser = init_denoiser(config.denoiser, rng);
  return p;
}

ModelParams zero_gradients(const ModelParams& params) {
  ModelParams g = params;
  g.visit_trainable([](const std::string&, Matrix& m) { m.setZero(); });
  return g;
}

void add_scaled(ModelParams& into, const ModelParams& from, double scale) {
  std::vector<const Matrix*> src;
  from.visit_trainable([&](const std::string&, const Matrix& m) { src.push_back(&m); });
  std::size_t i = 0;
  into.visit_trainable([&](const std::string&, Matrix& m) { m += scale * *src[i++]; });
}

}  // namespace scanpath
