#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "scanpath/corpus.hpp"
#include "scanpath/encoding.hpp"
#include "scanpath/model.hpp"
#include "scanpath/schedule.hpp"

namespace scanpath {

class Rng;

struct TrainConfig {
  long steps = 80000;
  int batch = 64;
  double lr = 1e-4;
  double weight_decay = 0.0;
  double clip_norm = 1.0;
  int t_max = 2000;
  ScheduleKind schedule = ScheduleKind::Sqrt;
  std::uint64_t seed = 0;
  long checkpoint_interval = 0;  // 0: final checkpoint only
  bool fill_target = true;
  int workers = 1;

  void validate() const;
};

/// Noise for one training example: the z_0 sampling noise and the forward
/// diffusion noise, both L x d. Only target rows are used.
struct NoiseDraw {
  Matrix embed_noise;
  Matrix diffusion_noise;
};

NoiseDraw draw_noise(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Loss of one example, averaged over its target rows.
///   t >= 2:   l_vlb   = mse(f(z_t, t), z_0)
///   t in 0,1: l_emb   = mse(f(z_t, t), Emb(x)), with z_t = z_0 at t = 0
///   always:   l_round = -log softmax(f(z_t, t) . idx_table^T)[x_idx]
/// total = weight * (l_vlb + l_emb) + l_round.
struct LossTerms {
  double l_vlb = 0.0;
  double l_emb = 0.0;
  double l_round = 0.0;
  double total = 0.0;
};

/// Evaluates one example. When `grads` is given, adds grad_scale * dtotal/dθ.
LossTerms instance_loss(const ModelParams& params, const EncodedInstance& inst, int t, double weight,
                        const NoiseSchedule& sched, const NoiseDraw& noise, ModelParams* grads = nullptr,
                        double grad_scale = 1.0);

/// Batch mean of the loss terms with one diffusion step per example.
LossTerms loss_terms(std::span<const EncodedInstance> batch, std::span<const int> steps, const ModelParams& params,
                     const NoiseSchedule& sched, Rng& rng);
LossTerms loss_terms(std::span<const EncodedInstance> batch, int t, const ModelParams& params,
                     const NoiseSchedule& sched, Rng& rng);

/// Encodes every record of the corpus; records that do not fit into max_len
/// are dropped with a warning. With `fill_target` the target region is
/// extended to the inference budget.
std::vector<EncodedInstance> build_training_set(const Corpus& corpus, const Vocabulary& vocab, int max_len,
                                                bool fill_target);

struct StepMetrics {
  long step = 0;
  int t = 0;  // step sampled for the first example of the batch
  double l_vlb = 0.0, l_emb = 0.0, l_round = 0.0, total = 0.0, grad_norm = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<StepMetrics> log;
};

/// Optimizes params on the training set. With an output directory, writes
/// metrics.csv, checkpoint.bin (latest) and checkpoint_step<N>.bin at each
/// interval. A non-finite loss aborts with DivergenceError after saving the
/// last good parameters.
TrainResult train(const std::vector<EncodedInstance>& data, ModelParams params, const TrainConfig& config,
                  const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_metrics(const std::vector<StepMetrics>& log, const std::filesystem::path& path);

}  // namespace scanpath
