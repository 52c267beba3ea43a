#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "scanpath/corpus.hpp"
#include "scanpath/encoding.hpp"
#include "scanpath/model.hpp"
#include "scanpath/schedule.hpp"

namespace scanpath {

/// State after one reverse step, handed to an observer.
struct ReverseStep {
  int t = 0;                    // step whose model call produced this state
  const Matrix& latent;         // z_{t-1}, all L rows, after both anchors
  const Matrix& anchored;       // target-row word-index estimates after rounding
  const std::vector<int>& indices;  // rounded word index per target row
  const EncodedInstance& instance;
  const Matrix& condition;      // Emb(x^w) rows the condition is reset to
};

struct GenerateOptions {
  int target_budget = 0;  // 0: fill the remaining length
  bool mean_only = false;
  std::uint64_t seed = 0;
  std::function<void(const ReverseStep&)> observer;
};

struct Generation {
  std::vector<int> fixations;
  std::vector<int> target_indices;  // final rounded indices over the target rows
  DecodeReport report;
};

/// Anchored reverse diffusion from Gaussian fixation latents. At every step
/// the model's z_0 estimate on the target rows is snapped to the nearest
/// index-table rows (dot product), z_{t-1} is drawn from the posterior on the
/// word-index component (posterior mean in mean-only mode, the estimate
/// itself at t = 1), and the condition rows are reset to Emb(x^w).
Generation generate(const TokenizedSentence& sentence, const ModelParams& params, const NoiseSchedule& sched,
                    const SpecialTokens& specials, const GenerateOptions& options);

/// Runs generate on each sentence (reader id "model"); sentences are spread
/// over `workers` threads with per-sentence seeds, so output does not depend
/// on the worker count.
Corpus generate_corpus(const std::map<std::string, std::vector<std::string>>& sentences, const Vocabulary& vocab,
                       const ModelParams& params, const NoiseSchedule& sched, const GenerateOptions& options,
                       int workers = 1);

/// Writes `t,position,dim,value` rows for the full latent after every
/// `stride`-th reverse step and after the final one; t is the index of the
/// latent written (final = 0). Returns the generation.
Generation dump_latent_trace(const TokenizedSentence& sentence, const ModelParams& params, const NoiseSchedule& sched,
                             const SpecialTokens& specials, GenerateOptions options, int stride,
                             const std::filesystem::path& path);

std::uint64_t sentence_seed(std::uint64_t seed, const std::string& sentence_id);

}  // namespace scanpath
