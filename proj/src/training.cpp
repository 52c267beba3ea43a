#include "scanpath/training.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <thread>

#include <spdlog/spdlog.h>

#include "scanpath/checkpoint.hpp"
#include "scanpath/error.hpp"
#include "scanpath/importance_sampler.hpp"
#include "scanpath/optimizer.hpp"
#include "scanpath/rng.hpp"

namespace scanpath {

void TrainConfig::validate() const {
  if (steps < 0) throw ConfigError("steps must be non-negative");
  if (batch < 1) throw ConfigError("batch size must be positive");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (weight_decay < 0.0 || clip_norm < 0.0) throw ConfigError("weight decay and clip norm must be non-negative");
  if (t_max < 1) throw ConfigError("t_max must be positive");
  if (checkpoint_interval < 0) throw ConfigError("checkpoint interval must be non-negative");
  if (workers < 1) throw ConfigError("workers must be positive");
}

NoiseDraw draw_noise(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  NoiseDraw n;
  n.embed_noise = random_normal(rows, cols, 1.0, rng);
  n.diffusion_noise = random_normal(rows, cols, 1.0, rng);
  return n;
}

LossTerms instance_loss(const ModelParams& params, const EncodedInstance& inst, int t, double weight,
                        const NoiseSchedule& sched, const NoiseDraw& noise, ModelParams* grads, double grad_scale) {
  if (t < 0 || t > sched.t_max()) throw ValidationError("diffusion step out of range");
  const Embedded e = embed(inst, params.embedding);
  const Eigen::Index len = e.total.rows();
  const Eigen::Index d = e.total.cols();
  const auto& target = inst.target_mask;

  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < len; ++i)
    if (target[static_cast<std::size_t>(i)]) rows.push_back(i);
  if (rows.empty()) throw ValidationError("instance has no target rows");
  const double n_rows = static_cast<double>(rows.size());

  // z_0 ~ N(Emb(x), beta_0) on the target rows; the condition stays clean.
  const double embed_scale = std::sqrt(sched.beta(0));
  Matrix idx0 = e.idx;
  for (Eigen::Index i : rows) idx0.row(i) += embed_scale * noise.embed_noise.row(i);
  const Matrix z0 = idx0 + e.context;

  // Partial noising of the word-index component only.
  Matrix zt = z0;
  double keep = 1.0;
  if (t >= 1) {
    keep = std::sqrt(sched.alpha_bar(t));
    const double spread = std::sqrt(1.0 - sched.alpha_bar(t));
    for (Eigen::Index i : rows) zt.row(i) = keep * idx0.row(i) + spread * noise.diffusion_noise.row(i) + e.context.row(i);
  }

  DenoiserCache cache;
  const Matrix y = denoiser_forward(params.denoiser, zt, t, inst.pad_mask, grads ? &cache : nullptr);
  const Matrix& regression_target = t <= 1 ? e.total : z0;

  double sq = 0.0;
  for (Eigen::Index i : rows) sq += (y.row(i) - regression_target.row(i)).squaredNorm();
  const double mse = sq / (n_rows * static_cast<double>(d));

  const Matrix& table = params.embedding.idx_table;
  double nll = 0.0;
  Matrix probs(static_cast<Eigen::Index>(rows.size()), table.rows());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::Index i = rows[r];
    RowVector logits = y.row(i) * table.transpose();
    const double mx = logits.maxCoeff();
    RowVector ex = (logits.array() - mx).exp();
    const double sum = ex.sum();
    nll += std::log(sum) + mx - logits(inst.x_idx[static_cast<std::size_t>(i)]);
    probs.row(static_cast<Eigen::Index>(r)) = ex / sum;
  }
  nll /= n_rows;

  LossTerms out;
  (t <= 1 ? out.l_emb : out.l_vlb) = mse;
  out.l_round = nll;
  out.total = weight * mse + nll;
  if (!grads) return out;

  Matrix dy = Matrix::Zero(len, d);
  Matrix d_idx = Matrix::Zero(len, d);
  Matrix d_ctx = Matrix::Zero(len, d);
  const double mse_coef = grad_scale * weight * 2.0 / (n_rows * static_cast<double>(d));
  Matrix& d_table = grads->embedding.idx_table;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::Index i = rows[r];
    const RowVector diff = mse_coef * (y.row(i) - regression_target.row(i));
    dy.row(i) += diff;
    // Both regression targets are Emb(x) plus parameter-free noise.
    d_idx.row(i) -= diff;
    d_ctx.row(i) -= diff;

    RowVector dlogits = probs.row(static_cast<Eigen::Index>(r));
    dlogits(inst.x_idx[static_cast<std::size_t>(i)]) -= 1.0;
    dlogits *= grad_scale / n_rows;
    dy.row(i) += dlogits * table;
    d_table.noalias() += dlogits.transpose() * y.row(i);
  }

  const Matrix dz = denoiser_backward(params.denoiser, cache, dy, grads->denoiser);
  for (Eigen::Index i = 0; i < len; ++i) {
    const bool noised = t >= 1 && target[static_cast<std::size_t>(i)];
    d_idx.row(i) += (noised ? keep : 1.0) * dz.row(i);
    d_ctx.row(i) += dz.row(i);
  }

  Matrix frozen_rows(len, params.embedding.frozen->cols());
  for (Eigen::Index i = 0; i < len; ++i) {
    const auto s = static_cast<std::size_t>(i);
    grads->embedding.idx_table.row(inst.x_idx[s]) += d_idx.row(i);
    grads->embedding.pos_table.row(inst.x_pos[s]) += d_ctx.row(i);
    frozen_rows.row(i) = params.embedding.frozen->row(inst.x_bert[s]);
  }
  grads->embedding.proj_weight.noalias() += frozen_rows.transpose() * d_ctx;
  grads->embedding.proj_bias.row(0) += d_ctx.colwise().sum();
  return out;
}

LossTerms loss_terms(std::span<const EncodedInstance> batch, std::span<const int> steps, const ModelParams& params,
                     const NoiseSchedule& sched, Rng& rng) {
  if (batch.size() != steps.size()) throw ValidationError("one diffusion step per example required");
  LossTerms mean;
  if (batch.empty()) return mean;
  const int len = batch.front().seq_len;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b].seq_len != len) throw ValidationError("batch instances must share one length");
    const auto noise = draw_noise(len, params.config.denoiser.hidden_dim, rng);
    const auto terms = instance_loss(params, batch[b], steps[b], 1.0, sched, noise);
    mean.l_vlb += terms.l_vlb;
    mean.l_emb += terms.l_emb;
    mean.l_round += terms.l_round;
    mean.total += terms.total;
  }
  const double n = static_cast<double>(batch.size());
  mean.l_vlb /= n;
  mean.l_emb /= n;
  mean.l_round /= n;
  mean.total /= n;
  return mean;
}

LossTerms loss_terms(std::span<const EncodedInstance> batch, int t, const ModelParams& params,
                     const NoiseSchedule& sched, Rng& rng) {
  std::vector<int> steps(batch.size(), t);
  return loss_terms(batch, steps, params, sched, rng);
}

std::vector<EncodedInstance> build_training_set(const Corpus& corpus, const Vocabulary& vocab, int max_len,
                                                bool fill_target) {
  const auto specials = SpecialTokens::from(vocab);
  std::map<std::string, TokenizedSentence> tokenized;
  std::vector<EncodedInstance> out;
  std::size_t dropped = 0;
  for (const auto& r : corpus.scanpaths) {
    auto it = tokenized.find(r.sentence_id);
    if (it == tokenized.end())
      it = tokenized.emplace(r.sentence_id, wordpiece_tokenize(corpus.sentences.at(r.sentence_id), vocab)).first;
    try {
      auto inst = encode_instance(it->second, r.fixations, max_len, specials);
      if (fill_target) inst = fill_target_region(inst, default_target_budget(it->second, max_len));
      out.push_back(std::move(inst));
    } catch (const LengthError& e) {
      ++dropped;
      spdlog::warn("dropping record (reader '{}', sentence '{}'): {}", r.reader_id, r.sentence_id, e.what());
    }
  }
  if (dropped > 0) spdlog::warn("{} of {} records exceed max length {}", dropped, corpus.scanpaths.size(), max_len);
  return out;
}

void write_metrics(const std::vector<StepMetrics>& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "step,t,l_vlb,l_emb,l_round,total,grad_norm\n" << std::setprecision(10);
  for (const auto& m : log)
    out << m.step << ',' << m.t << ',' << m.l_vlb << ',' << m.l_emb << ',' << m.l_round << ',' << m.total << ','
        << m.grad_norm << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

struct Example {
  std::size_t index;
  int t;
  double weight;
  NoiseDraw noise;
};

void save(const ModelParams& params, const TrainConfig& config, long step, const std::filesystem::path& path) {
  Checkpoint c{params, config.schedule, config.t_max, NoiseSchedule::kDefaultSqrtOffset, step};
  save_checkpoint(c, path);
}

}  // namespace

TrainResult train(const std::vector<EncodedInstance>& data, ModelParams params, const TrainConfig& config,
                  const std::optional<std::filesystem::path>& out_dir) {
  config.validate();
  if (data.empty()) throw ValidationError("training set is empty");
  if (out_dir) std::filesystem::create_directories(*out_dir);

  const NoiseSchedule sched(config.schedule, config.t_max);
  ImportanceSampler sampler(config.t_max);
  AdamW optimizer(params, {.lr = config.lr, .weight_decay = config.weight_decay});
  Rng rng(config.seed);
  const Eigen::Index d = params.config.denoiser.hidden_dim;

  TrainResult result;
  if (out_dir) save(params, config, 0, *out_dir / "checkpoint.bin");

  std::vector<std::size_t> order(data.size());
  std::size_t cursor = order.size();
  auto next_index = [&]() {
    if (cursor == order.size()) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      cursor = 0;
    }
    return order[cursor++];
  };

  const int workers = std::max(1, std::min(config.workers, config.batch));
  for (long step = 1; step <= config.steps; ++step) {
    std::vector<Example> batch;
    batch.reserve(static_cast<std::size_t>(config.batch));
    for (int b = 0; b < config.batch; ++b) {
      Example ex;
      ex.index = next_index();
      ex.t = sampler.sample(rng);
      ex.weight = sampler.weight(ex.t);
      ex.noise = draw_noise(data[ex.index].seq_len, d, rng);
      batch.push_back(std::move(ex));
    }

    const double scale = 1.0 / static_cast<double>(batch.size());
    std::vector<LossTerms> terms(batch.size());
    std::vector<ModelParams> partial(static_cast<std::size_t>(workers));
    auto run_chunk = [&](int w) {
      partial[static_cast<std::size_t>(w)] = zero_gradients(params);
      for (std::size_t b = static_cast<std::size_t>(w); b < batch.size(); b += static_cast<std::size_t>(workers)) {
        const auto& ex = batch[b];
        terms[b] = instance_loss(params, data[ex.index], ex.t, ex.weight, sched, ex.noise,
                                 &partial[static_cast<std::size_t>(w)], scale);
      }
    };
    if (workers == 1) {
      run_chunk(0);
    } else {
      std::vector<std::jthread> threads;
      for (int w = 0; w < workers; ++w) threads.emplace_back(run_chunk, w);
    }
    ModelParams& grads = partial[0];
    for (std::size_t w = 1; w < partial.size(); ++w) add_scaled(grads, partial[w], 1.0);

    StepMetrics m;
    m.step = step;
    m.t = batch.front().t;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      m.l_vlb += terms[b].l_vlb * scale;
      m.l_emb += terms[b].l_emb * scale;
      m.l_round += terms[b].l_round * scale;
      m.total += terms[b].total * scale;
    }
    if (!std::isfinite(m.total)) {
      if (out_dir) {
        save(params, config, step - 1, *out_dir / "checkpoint.bin");
        write_metrics(result.log, *out_dir / "metrics.csv");
      }
      throw DivergenceError("non-finite loss at step " + std::to_string(step));
    }
    m.grad_norm = clip_by_global_norm(grads, config.clip_norm);
    optimizer.step(params, grads);
    for (std::size_t b = 0; b < batch.size(); ++b) sampler.update(batch[b].t, terms[b].l_vlb + terms[b].l_emb);
    result.log.push_back(m);

    if (out_dir && config.checkpoint_interval > 0 && step % config.checkpoint_interval == 0) {
      save(params, config, step, *out_dir / ("checkpoint_step" + std::to_string(step) + ".bin"));
      save(params, config, step, *out_dir / "checkpoint.bin");
    }
  }

  if (out_dir) {
    save(params, config, config.steps, *out_dir / "checkpoint.bin");
    write_metrics(result.log, *out_dir / "metrics.csv");
  }
  result.params = std::move(params);
  return result;
}

}  // namespace scanpath
