#include "scanpath/inference.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "scanpath/error.hpp"
#include "scanpath/rng.hpp"

namespace scanpath {

std::uint64_t sentence_seed(std::uint64_t seed, const std::string& sentence_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : sentence_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix_seed(seed, h);
}

Generation generate(const TokenizedSentence& sentence, const ModelParams& params, const NoiseSchedule& sched,
                    const SpecialTokens& specials, const GenerateOptions& options) {
  const int max_len = params.config.max_len;
  const int budget = options.target_budget > 0 ? options.target_budget : default_target_budget(sentence, max_len);
  const EncodedInstance inst = encode_placeholder(sentence, budget, max_len, specials);
  const Embedded e = embed(inst, params.embedding);
  const Eigen::Index d = e.total.cols();
  const Eigen::Index cond_rows = inst.condition_length;
  const Eigen::Index begin = inst.target_begin();
  const Eigen::Index rows = inst.target_length;

  Rng rng(options.seed);
  const Matrix condition = e.total.topRows(cond_rows);
  const Matrix context = e.context.middleRows(begin, rows);
  Matrix y = random_normal(rows, d, 1.0, rng);  // word-index component of the target rows
  Matrix z = e.total;
  z.middleRows(begin, rows) = y + context;

  const Matrix& table = params.embedding.idx_table;
  std::vector<int> indices;
  Matrix anchored(rows, d);
  for (int t = sched.t_max(); t >= 1; --t) {
    const Matrix out = denoiser_forward(params.denoiser, z, t, inst.pad_mask);
    indices = round_argmax(out.middleRows(begin, rows), table);
    for (Eigen::Index r = 0; r < rows; ++r) anchored.row(r) = table.row(indices[static_cast<std::size_t>(r)]);

    if (t >= 2) {
      Posterior post = posterior_params(y, anchored, t, sched);
      y = std::move(post.mean);
      if (!options.mean_only) {
        const double sd = std::sqrt(post.variance);
        for (Eigen::Index r = 0; r < rows; ++r)
          for (Eigen::Index c = 0; c < d; ++c) y(r, c) += sd * rng.normal();
      }
    } else {
      y = anchored;
    }
    z.middleRows(begin, rows) = y + context;
    z.topRows(cond_rows) = condition;
    if (options.observer) options.observer(ReverseStep{t, z, anchored, indices, inst, condition});
  }

  Generation g;
  g.target_indices = indices;
  g.fixations = decode_prediction(indices, sentence.word_count, budget, &g.report);
  if (g.report.clamped > 0) spdlog::debug("clamped {} decoded indices into the sentence", g.report.clamped);
  if (g.report.empty_fallback) spdlog::info("empty decoded scanpath replaced by a single fixation on word 1");
  return g;
}

Corpus generate_corpus(const std::map<std::string, std::vector<std::string>>& sentences, const Vocabulary& vocab,
                       const ModelParams& params, const NoiseSchedule& sched, const GenerateOptions& options,
                       int workers) {
  const auto specials = SpecialTokens::from(vocab);
  std::vector<std::pair<std::string, TokenizedSentence>> jobs;
  for (const auto& [id, words] : sentences) {
    auto tok = wordpiece_tokenize(words, vocab);
    if (condition_length(tok) + 3 > params.config.max_len) {
      spdlog::warn("skipping sentence '{}': longer than max length {}", id, params.config.max_len);
      continue;
    }
    jobs.emplace_back(id, std::move(tok));
  }
  std::vector<Generation> results(jobs.size());
  std::size_t clamped = 0;
  auto run = [&](std::size_t w, std::size_t stride) {
    for (std::size_t j = w; j < jobs.size(); j += stride) {
      GenerateOptions o = options;
      o.seed = sentence_seed(options.seed, jobs[j].first);
      o.observer = nullptr;
      results[j] = generate(jobs[j].second, params, sched, specials, o);
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
  if (n_workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(run, w, n_workers);
  }

  Corpus out;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    out.sentences.emplace(jobs[j].first, sentences.at(jobs[j].first));
    out.scanpaths.push_back({"model", jobs[j].first, results[j].fixations});
    clamped += static_cast<std::size_t>(results[j].report.clamped);
  }
  if (!out.scanpaths.empty()) out.readers.insert("model");
  if (clamped > 0) spdlog::warn("{} decoded indices were clamped into their sentence", clamped);
  return out;
}

Generation dump_latent_trace(const TokenizedSentence& sentence, const ModelParams& params, const NoiseSchedule& sched,
                             const SpecialTokens& specials, GenerateOptions options, int stride,
                             const std::filesystem::path& path) {
  if (stride < 1) throw ConfigError("trace stride must be at least 1");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "t,position,dim,value\n" << std::setprecision(9);
  int step = 0;
  options.observer = [&](const ReverseStep& s) {
    const bool last = s.t == 1;
    if (step % stride == 0 || last) {
      for (Eigen::Index i = 0; i < s.latent.rows(); ++i)
        for (Eigen::Index j = 0; j < s.latent.cols(); ++j)
          out << (s.t - 1) << ',' << i << ',' << j << ',' << s.latent(i, j) << '\n';
    }
    ++step;
  };
  Generation g = generate(sentence, params, sched, specials, options);
  if (!out) throw IoError("write failed: " + path.string());
  return g;
}

}  // namespace scanpath
