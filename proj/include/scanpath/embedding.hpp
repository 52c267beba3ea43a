#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "scanpath/encoding.hpp"
#include "scanpath/tensor.hpp"

namespace scanpath {

class Rng;

/// Emb(x) = idx_table[x_idx] + (frozen[x_bert] * proj_weight + proj_bias) + pos_table[x_pos].
/// The frozen token table is shared and never receives gradients; the index
/// table doubles as the rounding layer.
struct EmbeddingParams {
  Matrix idx_table;    // V_idx x d
  Matrix pos_table;    // L x d
  Matrix proj_weight;  // d_frozen x d
  Matrix proj_bias;    // 1 x d
  std::shared_ptr<const Matrix> frozen;  // token vocabulary x d_frozen

  int hidden_dim() const { return static_cast<int>(idx_table.cols()); }

  template <class F>
  void visit_trainable(F&& f) {
    f("embedding.idx_table", idx_table);
    f("embedding.pos_table", pos_table);
    f("embedding.proj_weight", proj_weight);
    f("embedding.proj_bias", proj_bias);
  }
  template <class F>
  void visit_trainable(F&& f) const {
    f("embedding.idx_table", idx_table);
    f("embedding.pos_table", pos_table);
    f("embedding.proj_weight", proj_weight);
    f("embedding.proj_bias", proj_bias);
  }
};

struct Embedded {
  Matrix total;    // L x d
  Matrix idx;      // word-index component
  Matrix context;  // frozen-token projection plus position component
};

Embedded embed(const EncodedInstance& inst, const EmbeddingParams& p);

/// z_0 = total + sqrt(beta0) * eps on rows where `rows` is true (all rows when
/// `rows` is empty).
Matrix sample_z0(const Matrix& total, double beta0, Rng& rng, const std::vector<bool>& rows = {});

/// Dot-product logits against the index table, L x V_idx.
Matrix round_logits(const Matrix& z, const Matrix& idx_table);

/// Per-row argmax of round_logits; ties resolve to the lowest index.
std::vector<int> round_argmax(const Matrix& z, const Matrix& idx_table);

/// Frozen token table file: a JSON header line {"vocab": n, "dim": d} then
/// n*d little-endian float32 values, row-major.
Matrix load_frozen_table(const std::filesystem::path& path);
void save_frozen_table(const Matrix& table, const std::filesystem::path& path);

/// Seeded stand-in for pre-trained token embeddings.
Matrix random_frozen_table(int vocab_size, int dim, std::uint64_t seed);

}  // namespace scanpath
