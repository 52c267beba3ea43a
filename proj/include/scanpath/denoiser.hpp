#pragma once

#include <string>
#include <vector>

#include "scanpath/tensor.hpp"

namespace scanpath {

class Rng;

struct DenoiserConfig {
  int hidden_dim = 256;
  int blocks = 12;
  int heads = 8;
  int ffn_mult = 4;

  void validate() const;
};

/// One pre-norm encoder block: x + Attn(LN1(x)), then x + FFN(LN2(x)).
struct BlockParams {
  Matrix ln1_gain, ln1_bias;
  Matrix w_q, b_q, w_k, b_k, w_v, b_v, w_o, b_o;
  Matrix ln2_gain, ln2_bias;
  Matrix w_ff1, b_ff1, w_ff2, b_ff2;

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "ln1_gain", self.ln1_gain);
    f(prefix + "ln1_bias", self.ln1_bias);
    f(prefix + "w_q", self.w_q);
    f(prefix + "b_q", self.b_q);
    f(prefix + "w_k", self.w_k);
    f(prefix + "b_k", self.b_k);
    f(prefix + "w_v", self.w_v);
    f(prefix + "b_v", self.b_v);
    f(prefix + "w_o", self.w_o);
    f(prefix + "b_o", self.b_o);
    f(prefix + "ln2_gain", self.ln2_gain);
    f(prefix + "ln2_bias", self.ln2_bias);
    f(prefix + "w_ff1", self.w_ff1);
    f(prefix + "b_ff1", self.b_ff1);
    f(prefix + "w_ff2", self.w_ff2);
    f(prefix + "b_ff2", self.b_ff2);
  }
};

/// f(z_t, t): sinusoidal step features pass through a two-layer SiLU
/// projection and are added to every row of z_t; the sum is layer-normed,
/// run through the encoder blocks, layer-normed again and projected back.
struct DenoiserParams {
  DenoiserConfig config;
  Matrix time_w1, time_b1, time_w2, time_b2;
  Matrix ln_in_gain, ln_in_bias;
  std::vector<BlockParams> blocks;
  Matrix ln_out_gain, ln_out_bias;
  Matrix w_out, b_out;

  template <class F>
  void visit(F&& f) { visit_impl(*this, f); }
  template <class F>
  void visit(F&& f) const { visit_impl(*this, f); }

 private:
  template <class Self, class F>
  static void visit_impl(Self& self, F& f) {
    f("denoiser.time_w1", self.time_w1);
    f("denoiser.time_b1", self.time_b1);
    f("denoiser.time_w2", self.time_w2);
    f("denoiser.time_b2", self.time_b2);
    f("denoiser.ln_in_gain", self.ln_in_gain);
    f("denoiser.ln_in_bias", self.ln_in_bias);
    for (std::size_t b = 0; b < self.blocks.size(); ++b)
      BlockParams::visit(self.blocks[b], "denoiser.block" + std::to_string(b) + ".", f);
    f("denoiser.ln_out_gain", self.ln_out_gain);
    f("denoiser.ln_out_bias", self.ln_out_bias);
    f("denoiser.w_out", self.w_out);
    f("denoiser.b_out", self.b_out);
  }
};

/// Weights ~ N(0, 0.02^2); biases, each block's attention output and second
/// feed-forward projection start at zero; layer-norm gains at one.
DenoiserParams init_denoiser(const DenoiserConfig& config, Rng& rng);

/// Parameter-shaped zeros, used as a gradient accumulator.
DenoiserParams zeros_like(const DenoiserParams& params);

struct LayerNormCache {
  Matrix xhat;
  Eigen::VectorXd inv_std;
};

struct BlockCache {
  LayerNormCache ln1;
  Matrix attn_in;  // LN1 output
  Matrix q, k, v;
  std::vector<Matrix> probs;  // per head, L x L
  Matrix heads_out;           // concatenated head outputs, L x d
  LayerNormCache ln2;
  Matrix ffn_in;  // LN2 output
  Matrix ffn_pre;  // before GELU
  Matrix ffn_act;  // after GELU
};

struct DenoiserCache {
  bool valid = false;
  int t = 0;
  std::vector<bool> key_mask;
  RowVector time_features, time_pre, time_hidden;
  LayerNormCache ln_in;
  std::vector<BlockCache> blocks;
  LayerNormCache ln_out;
  Matrix out_normed;
};

/// Sinusoidal features of step t: cos in the first half, sin in the second.
RowVector timestep_features(int t, int dim);

/// Predicts z_0 from z_t. Attention only reads keys whose pad_mask entry is
/// true. Fills `cache` for a later backward pass when given.
Matrix denoiser_forward(const DenoiserParams& params, const Matrix& z_t, int t, const std::vector<bool>& pad_mask,
                        DenoiserCache* cache = nullptr);

/// Accumulates parameter gradients into `grads` and returns dL/dz_t.
Matrix denoiser_backward(const DenoiserParams& params, const DenoiserCache& cache, const Matrix& d_out,
                         DenoiserParams& grads);

}  // namespace scanpath
