#include "scanpath/denoiser.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "scanpath/error.hpp"
#include "scanpath/rng.hpp"

namespace scanpath {

namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kInitStd = 0.02;

Matrix ones_row(Eigen::Index n) { return Matrix::Ones(1, n); }
Matrix zeros(Eigen::Index r, Eigen::Index c) { return Matrix::Zero(r, c); }

Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias, LayerNormCache* cache) {
  const Eigen::Index n = x.rows(), d = x.cols();
  Matrix xhat(n, d);
  Eigen::VectorXd inv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().mean();
    inv(i) = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(i) = (x.row(i).array() - mu) * inv(i);
  }
  Matrix y = (xhat.array().rowwise() * gain.row(0).array()).rowwise() + bias.row(0).array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv);
  }
  return y;
}

Matrix layer_norm_backward(const Matrix& dy, const LayerNormCache& c, const Matrix& gain, Matrix& dgain,
                           Matrix& dbias) {
  dgain.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  dbias.row(0) += dy.colwise().sum();
  Matrix dxhat = dy.array().rowwise() * gain.row(0).array();
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double m1 = dxhat.row(i).mean();
    const double m2 = (dxhat.row(i).array() * c.xhat.row(i).array()).mean();
    dx.row(i) = c.inv_std(i) * (dxhat.row(i).array() - m1 - c.xhat.row(i).array() * m2);
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }
double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double silu(double x) { return x * sigmoid(x); }
double silu_grad(double x) {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

void add_bias(Matrix& m, const Matrix& bias) { m.rowwise() += bias.row(0); }

}  // namespace

void DenoiserConfig::validate() const {
  if (hidden_dim < 1 || blocks < 0 || heads < 1 || ffn_mult < 1)
    throw ConfigError("denoiser dimensions must be positive");
  if (hidden_dim % heads != 0)
    throw ConfigError("hidden dim " + std::to_string(hidden_dim) + " not divisible by " +
                      std::to_string(heads) + " heads");
}

DenoiserParams init_denoiser(const DenoiserConfig& config, Rng& rng) {
  config.validate();
  const Eigen::Index d = config.hidden_dim;
  const Eigen::Index ff = d * config.ffn_mult;
  DenoiserParams p;
  p.config = config;
  p.time_w1 = random_normal(d, d, kInitStd, rng);
  p.time_b1 = zeros(1, d);
  p.time_w2 = random_normal(d, d, kInitStd, rng);
  p.time_b2 = zeros(1, d);
  p.ln_in_gain = ones_row(d);
  p.ln_in_bias = zeros(1, d);
  for (int b = 0; b < config.blocks; ++b) {
    BlockParams blk;
    blk.ln1_gain = ones_row(d);
    blk.ln1_bias = zeros(1, d);
    blk.w_q = random_normal(d, d, kInitStd, rng);
    blk.b_q = zeros(1, d);
    blk.w_k = random_normal(d, d, kInitStd, rng);
    blk.b_k = zeros(1, d);
    blk.w_v = random_normal(d, d, kInitStd, rng);
    blk.b_v = zeros(1, d);
    blk.w_o = zeros(d, d);
    blk.b_o = zeros(1, d);
    blk.ln2_gain = ones_row(d);
    blk.ln2_bias = zeros(1, d);
    blk.w_ff1 = random_normal(d, ff, kInitStd, rng);
    blk.b_ff1 = zeros(1, ff);
    blk.w_ff2 = zeros(ff, d);
    blk.b_ff2 = zeros(1, d);
    p.blocks.push_back(std::move(blk));
  }
  p.ln_out_gain = ones_row(d);
  p.ln_out_bias = zeros(1, d);
  p.w_out = random_normal(d, d, kInitStd, rng);
  p.b_out = zeros(1, d);
  return p;
}

DenoiserParams zeros_like(const DenoiserParams& params) {
  DenoiserParams z = params;
  z.visit([](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

RowVector timestep_features(int t, int dim) {
  RowVector out = RowVector::Zero(dim);
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / half);
    out(i) = std::cos(t * freq);
    out(half + i) = std::sin(t * freq);
  }
  return out;
}

Matrix denoiser_forward(const DenoiserParams& params, const Matrix& z_t, int t, const std::vector<bool>& pad_mask,
                        DenoiserCache* cache) {
  const auto& cfg = params.config;
  const Eigen::Index len = z_t.rows();
  const Eigen::Index d = cfg.hidden_dim;
  if (z_t.cols() != d) throw ValidationError("latent width does not match hidden dim");
  if (static_cast<Eigen::Index>(pad_mask.size()) != len) throw ValidationError("pad mask length mismatch");
  const int heads = cfg.heads;
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  DenoiserCache local;
  DenoiserCache& c = cache ? *cache : local;
  const bool keep = cache != nullptr;
  c.valid = false;
  c.t = t;
  c.key_mask = pad_mask;
  c.blocks.assign(params.blocks.size(), {});

  RowVector features = timestep_features(t, static_cast<int>(d));
  RowVector pre = features * params.time_w1 + params.time_b1.row(0);
  RowVector hidden = pre.unaryExpr([](double x) { return silu(x); });
  RowVector temb = hidden * params.time_w2 + params.time_b2.row(0);
  if (keep) {
    c.time_features = features;
    c.time_pre = pre;
    c.time_hidden = hidden;
  }

  Matrix h0 = z_t;
  h0.rowwise() += temb;
  Matrix h = layer_norm(h0, params.ln_in_gain, params.ln_in_bias, keep ? &c.ln_in : nullptr);

  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    const BlockParams& blk = params.blocks[b];
    BlockCache& bc = c.blocks[b];
    Matrix a = layer_norm(h, blk.ln1_gain, blk.ln1_bias, keep ? &bc.ln1 : nullptr);
    Matrix q = a * blk.w_q;
    add_bias(q, blk.b_q);
    Matrix k = a * blk.w_k;
    add_bias(k, blk.b_k);
    Matrix v = a * blk.w_v;
    add_bias(v, blk.b_v);
    Matrix heads_out(len, d);
    if (keep) bc.probs.resize(static_cast<std::size_t>(heads));
    for (int hd = 0; hd < heads; ++hd) {
      const Eigen::Index off = hd * dh;
      Matrix s = (q.middleCols(off, dh) * k.middleCols(off, dh).transpose()) * scale;
      for (Eigen::Index i = 0; i < len; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < len; ++j)
          if (pad_mask[static_cast<std::size_t>(j)]) mx = std::max(mx, s(i, j));
        double sum = 0.0;
        for (Eigen::Index j = 0; j < len; ++j) {
          const double e = pad_mask[static_cast<std::size_t>(j)] ? std::exp(s(i, j) - mx) : 0.0;
          s(i, j) = e;
          sum += e;
        }
        if (sum > 0.0) s.row(i) /= sum;
      }
      heads_out.middleCols(off, dh) = s * v.middleCols(off, dh);
      if (keep) bc.probs[static_cast<std::size_t>(hd)] = std::move(s);
    }
    Matrix attn = heads_out * blk.w_o;
    add_bias(attn, blk.b_o);
    h += attn;

    Matrix fin = layer_norm(h, blk.ln2_gain, blk.ln2_bias, keep ? &bc.ln2 : nullptr);
    Matrix fpre = fin * blk.w_ff1;
    add_bias(fpre, blk.b_ff1);
    Matrix fact = fpre.unaryExpr([](double x) { return gelu(x); });
    Matrix fout = fact * blk.w_ff2;
    add_bias(fout, blk.b_ff2);
    h += fout;

    if (keep) {
      bc.attn_in = std::move(a);
      bc.q = std::move(q);
      bc.k = std::move(k);
      bc.v = std::move(v);
      bc.heads_out = std::move(heads_out);
      bc.ffn_in = std::move(fin);
      bc.ffn_pre = std::move(fpre);
      bc.ffn_act = std::move(fact);
    }
  }

  Matrix normed = layer_norm(h, params.ln_out_gain, params.ln_out_bias, keep ? &c.ln_out : nullptr);
  Matrix out = normed * params.w_out;
  add_bias(out, params.b_out);
  if (keep) {
    c.out_normed = std::move(normed);
    c.valid = true;
  }
  return out;
}

Matrix denoiser_backward(const DenoiserParams& params, const DenoiserCache& c, const Matrix& d_out,
                         DenoiserParams& grads) {
  if (!c.valid) throw std::logic_error("denoiser_backward called without a forward cache");
  const auto& cfg = params.config;
  const Eigen::Index d = cfg.hidden_dim;
  const int heads = cfg.heads;
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  grads.w_out.noalias() += c.out_normed.transpose() * d_out;
  grads.b_out.row(0) += d_out.colwise().sum();
  Matrix dnormed = d_out * params.w_out.transpose();
  Matrix dh_ = layer_norm_backward(dnormed, c.ln_out, params.ln_out_gain, grads.ln_out_gain, grads.ln_out_bias);

  for (std::size_t bi = params.blocks.size(); bi-- > 0;) {
    const BlockParams& blk = params.blocks[bi];
    BlockParams& g = grads.blocks[bi];
    const BlockCache& bc = c.blocks[bi];

    // feed-forward branch
    g.w_ff2.noalias() += bc.ffn_act.transpose() * dh_;
    g.b_ff2.row(0) += dh_.colwise().sum();
    Matrix dact = dh_ * blk.w_ff2.transpose();
    Matrix dpre = dact.array() * bc.ffn_pre.unaryExpr([](double x) { return gelu_grad(x); }).array();
    g.w_ff1.noalias() += bc.ffn_in.transpose() * dpre;
    g.b_ff1.row(0) += dpre.colwise().sum();
    Matrix dfin = dpre * blk.w_ff1.transpose();
    dh_ += layer_norm_backward(dfin, bc.ln2, blk.ln2_gain, g.ln2_gain, g.ln2_bias);

    // attention branch
    g.w_o.noalias() += bc.heads_out.transpose() * dh_;
    g.b_o.row(0) += dh_.colwise().sum();
    Matrix dheads = dh_ * blk.w_o.transpose();
    Matrix dq(dheads.rows(), d), dk(dheads.rows(), d), dv(dheads.rows(), d);
    for (int hd = 0; hd < heads; ++hd) {
      const Eigen::Index off = hd * dh;
      const Matrix& p = bc.probs[static_cast<std::size_t>(hd)];
      Matrix dout_h = dheads.middleCols(off, dh);
      Matrix dp = dout_h * bc.v.middleCols(off, dh).transpose();
      dv.middleCols(off, dh) = p.transpose() * dout_h;
      Matrix ds = p.array() * (dp.colwise() - (dp.array() * p.array()).rowwise().sum().matrix()).array();
      ds *= scale;
      dq.middleCols(off, dh) = ds * bc.k.middleCols(off, dh);
      dk.middleCols(off, dh) = ds.transpose() * bc.q.middleCols(off, dh);
    }
    g.w_q.noalias() += bc.attn_in.transpose() * dq;
    g.b_q.row(0) += dq.colwise().sum();
    g.w_k.noalias() += bc.attn_in.transpose() * dk;
    g.b_k.row(0) += dk.colwise().sum();
    g.w_v.noalias() += bc.attn_in.transpose() * dv;
    g.b_v.row(0) += dv.colwise().sum();
    Matrix da = dq * blk.w_q.transpose() + dk * blk.w_k.transpose() + dv * blk.w_v.transpose();
    dh_ += layer_norm_backward(da, bc.ln1, blk.ln1_gain, g.ln1_gain, g.ln1_bias);
  }

  Matrix dh0 = layer_norm_backward(dh_, c.ln_in, params.ln_in_gain, grads.ln_in_gain, grads.ln_in_bias);
  RowVector dtemb = dh0.colwise().sum();
  grads.time_w2.noalias() += c.time_hidden.transpose() * dtemb;
  grads.time_b2.row(0) += dtemb;
  RowVector dhidden = dtemb * params.time_w2.transpose();
  RowVector dpre = dhidden.array() * c.time_pre.unaryExpr([](double x) { return silu_grad(x); }).array();
  grads.time_w1.noalias() += c.time_features.transpose() * dpre;
  grads.time_b1.row(0) += dpre;
  return dh0;
}

}  // namespace scanpath
