// Command-line front end: corpus preparation, training, generation,
// evaluation, baselines, schedule dumps and latent traces.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "scanpath/baselines.hpp"
#include "scanpath/checkpoint.hpp"
#include "scanpath/corpus.hpp"
#include "scanpath/embedding.hpp"
#include "scanpath/error.hpp"
#include "scanpath/inference.hpp"
#include "scanpath/report.hpp"
#include "scanpath/rng.hpp"
#include "scanpath/splits.hpp"
#include "scanpath/tokenizer.hpp"
#include "scanpath/training.hpp"

namespace fs = std::filesystem;
using namespace scanpath;

namespace {

struct Settings {
  std::uint64_t seed = 0;
  int t_max = 2000;
  std::string schedule = "sqrt";
  int hidden_dim = 256;
  int blocks = 12;
  int heads = 8;
  int max_len = 128;
  int frozen_dim = 768;
  long steps = 80000;
  int batch = 64;
  double lr = 1e-4;
  double weight_decay = 0.0;
  double clip_norm = 1.0;
  long checkpoint_interval = 0;
  std::string split_mode = "new_reader_new_sentence";
  int folds = 5;
  int workers = 1;
  bool mean_only = false;
  int trace_stride = 100;

  std::string fixations, sentences, vocab, embeddings, out, checkpoint, splits, truth, predictors, sentence_id;
  std::vector<std::string> pred;
  int fold = -1;
  int budget = 0;
  std::string kind;
};

// Flags are registered under both spellings so that config files can use
// underscore keys.
std::string both(const std::string& name) {
  std::string under = name;
  for (char& c : under)
    if (c == '-') c = '_';
  return under == name ? "--" + name : "--" + name + ",--" + under;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required option --") + flag);
}

// Records selected by --splits/--fold, or the whole corpus.
Corpus fold_part(const Corpus& corpus, const Settings& s, bool test_part) {
  if (s.splits.empty()) return corpus;
  const SplitPlan plan = load_splits(s.splits);
  if (s.fold < 0 || s.fold >= static_cast<int>(plan.folds.size()))
    throw ConfigError("--fold must be in [0, " + std::to_string(plan.folds.size()) + ")");
  const Fold& f = plan.folds[static_cast<std::size_t>(s.fold)];
  return subset(corpus, select_records(corpus, test_part ? f.test : f.train));
}

std::map<std::string, std::vector<std::string>> sentences_for(const Settings& s) {
  auto all = load_sentences(s.sentences);
  if (s.splits.empty()) return all;
  require(s.fixations, "fixations");
  const Corpus test = fold_part(load_corpus(s.fixations, all), s, true);
  return test.sentences;
}

int cmd_prepare(const Settings& s) {
  require(s.fixations, "fixations");
  require(s.sentences, "sentences");
  require(s.out, "out");
  Corpus corpus = load_corpus(s.fixations, s.sentences);
  if (!s.vocab.empty()) {
    const Vocabulary vocab = Vocabulary::load(s.vocab);
    std::vector<std::size_t> keep;
    std::set<std::string> dropped;
    for (std::size_t i = 0; i < corpus.scanpaths.size(); ++i) {
      const auto& id = corpus.scanpaths[i].sentence_id;
      const auto tok = wordpiece_tokenize(corpus.sentences.at(id), vocab);
      // Sentence rows, target CLS/SEP and at least one fixation slot.
      if (condition_length(tok) + 3 <= s.max_len)
        keep.push_back(i);
      else
        dropped.insert(id);
    }
    for (const auto& id : dropped) spdlog::warn("dropping sentence '{}': exceeds max length {}", id, s.max_len);
    corpus = subset(corpus, keep);
  }
  fs::create_directories(s.out);
  write_fixations(corpus, fs::path(s.out) / "fixations.csv");
  write_sentences(corpus, fs::path(s.out) / "sentences.csv");
  const SplitPlan plan = make_splits(corpus, parse_split_mode(s.split_mode), s.folds, s.seed);
  save_splits(plan, fs::path(s.out) / "splits.json");
  std::cout << "scanpaths=" << corpus.scanpaths.size() << " sentences=" << corpus.sentences.size()
            << " readers=" << corpus.readers.size() << " folds=" << plan.folds.size() << '\n';
  return 0;
}

int cmd_train(const Settings& s) {
  require(s.fixations, "fixations");
  require(s.sentences, "sentences");
  require(s.vocab, "vocab");
  require(s.out, "out");
  const Vocabulary vocab = Vocabulary::load(s.vocab);
  const Corpus corpus = fold_part(load_corpus(s.fixations, s.sentences), s, false);

  auto frozen = std::make_shared<const Matrix>(s.embeddings.empty()
                                                   ? random_frozen_table(vocab.size(), s.frozen_dim, mix_seed(s.seed, 1))
                                                   : load_frozen_table(s.embeddings));
  if (frozen->rows() != vocab.size())
    throw ConfigError("embedding table has " + std::to_string(frozen->rows()) + " rows, vocabulary has " +
                      std::to_string(vocab.size()));

  ModelConfig mc;
  mc.max_len = s.max_len;
  mc.denoiser.hidden_dim = s.hidden_dim;
  mc.denoiser.blocks = s.blocks;
  mc.denoiser.heads = s.heads;
  mc.validate();

  TrainConfig tc;
  tc.steps = s.steps;
  tc.batch = s.batch;
  tc.lr = s.lr;
  tc.weight_decay = s.weight_decay;
  tc.clip_norm = s.clip_norm;
  tc.t_max = s.t_max;
  tc.schedule = parse_schedule_kind(s.schedule);
  tc.seed = s.seed;
  tc.checkpoint_interval = s.checkpoint_interval;
  tc.workers = s.workers;
  tc.validate();

  const auto data = build_training_set(corpus, vocab, s.max_len, tc.fill_target);
  if (data.empty()) throw ValidationError("no trainable scanpaths in the corpus");
  spdlog::info("training on {} scanpaths for {} steps", data.size(), tc.steps);
  const TrainResult result = train(data, init_model(mc, frozen, s.seed), tc, fs::path(s.out));
  if (!result.log.empty()) std::cout << "final_loss=" << result.log.back().total << '\n';
  std::cout << "checkpoint=" << (fs::path(s.out) / "checkpoint.bin").string() << '\n';
  return 0;
}

int cmd_generate(const Settings& s) {
  require(s.checkpoint, "checkpoint");
  require(s.sentences, "sentences");
  require(s.vocab, "vocab");
  require(s.out, "out");
  const Checkpoint ckpt = load_checkpoint(s.checkpoint);
  const NoiseSchedule sched = build_schedule(ckpt.schedule, ckpt.t_max, ckpt.schedule_offset);
  GenerateOptions options;
  options.target_budget = s.budget;
  options.mean_only = s.mean_only;
  options.seed = s.seed;
  const Corpus out =
      generate_corpus(sentences_for(s), Vocabulary::load(s.vocab), ckpt.params, sched, options, s.workers);
  write_fixations(out, s.out);
  std::cout << "generated=" << out.scanpaths.size() << '\n';
  return 0;
}

int cmd_evaluate(const Settings& s) {
  require(s.truth, "true");
  require(s.sentences, "sentences");
  if (s.pred.empty()) throw ConfigError("missing required option --pred");
  const auto sentences = load_sentences(s.sentences);
  const Corpus truth = load_corpus(s.truth, sentences);
  std::vector<Generator> generators;
  for (const auto& p : s.pred) {
    std::string name = fs::path(p).stem().string();
    for (const auto& g : generators)
      if (g.name == name) name += "_" + std::to_string(generators.size());
    generators.push_back({name, load_corpus(p, sentences)});
  }
  std::optional<PredictorTable> predictors;
  if (!s.predictors.empty()) predictors = load_predictors(s.predictors);
  const fs::path out_dir = s.out.empty() ? fs::path("report") : fs::path(s.out);
  const ReportSummary summary = write_report(truth, generators, out_dir, predictors);
  for (std::size_t i = 0; i < summary.mean_nld.size(); ++i)
    std::cout << summary.mean_nld[i].first << " mean_nld=" << summary.mean_nld[i].second
              << " se=" << summary.nld_standard_error[i].second << '\n';
  return 0;
}

int cmd_baseline(const Settings& s) {
  require(s.fixations, "fixations");
  require(s.sentences, "sentences");
  const auto sentences = load_sentences(s.sentences);
  const Corpus corpus = load_corpus(s.fixations, sentences);
  if (s.kind == "human") {
    const HumanBaseline h = human_baseline(fold_part(corpus, s, true));
    std::cout << "human mean_nld=" << h.mean << " se=" << h.standard_error << " n=" << h.scanpaths << '\n';
    return 0;
  }
  require(s.out, "out");
  const BaselineKind kind = s.kind == "uniform" ? BaselineKind::Uniform : BaselineKind::TrainLabel;
  const auto dist = EmpiricalDistribution::from(fold_part(corpus, s, false));
  const auto targets = s.splits.empty() ? sentences : fold_part(corpus, s, true).sentences;
  const Corpus out = baseline_corpus(kind, dist, targets, s.seed);
  write_fixations(out, s.out);
  std::cout << "generated=" << out.scanpaths.size() << '\n';
  return 0;
}

int cmd_schedule_dump(const Settings& s) {
  const NoiseSchedule sched = build_schedule(parse_schedule_kind(s.kind.empty() ? s.schedule : s.kind), s.t_max);
  std::ofstream file;
  if (!s.out.empty()) {
    file.open(s.out);
    if (!file) throw IoError("cannot write " + s.out);
  }
  std::ostream& out = s.out.empty() ? std::cout : file;
  out.precision(17);
  out << "t,beta,alpha,alpha_bar\n";
  for (int t = 1; t <= sched.t_max(); ++t)
    out << t << ',' << sched.beta(t) << ',' << sched.alpha(t) << ',' << sched.alpha_bar(t) << '\n';
  return 0;
}

int cmd_trace(const Settings& s) {
  require(s.checkpoint, "checkpoint");
  require(s.sentences, "sentences");
  require(s.vocab, "vocab");
  require(s.sentence_id, "sentence-id");
  require(s.out, "out");
  const Checkpoint ckpt = load_checkpoint(s.checkpoint);
  const NoiseSchedule sched = build_schedule(ckpt.schedule, ckpt.t_max, ckpt.schedule_offset);
  const auto sentences = load_sentences(s.sentences);
  const auto it = sentences.find(s.sentence_id);
  if (it == sentences.end()) throw ValidationError("unknown sentence '" + s.sentence_id + "'");
  const Vocabulary vocab = Vocabulary::load(s.vocab);
  GenerateOptions options;
  options.target_budget = s.budget;
  options.mean_only = s.mean_only;
  options.seed = sentence_seed(s.seed, s.sentence_id);
  const Generation g = dump_latent_trace(wordpiece_tokenize(it->second, vocab), ckpt.params, sched,
                                         SpecialTokens::from(vocab), options, s.trace_stride, s.out);
  std::cout << "scanpath=";
  for (std::size_t i = 0; i < g.fixations.size(); ++i) std::cout << (i ? " " : "") << g.fixations[i];
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("scanpath"));
  spdlog::set_pattern("[%l] %v");

  Settings s;
  CLI::App app{"Scanpath generation with an embedding-space diffusion model"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option(both("seed"), s.seed, "random seed");
  app.add_option(both("t-max"), s.t_max, "number of diffusion steps");
  app.add_option(both("schedule"), s.schedule, "noise schedule: sqrt|linear|cosine|trunc_cosine|trunc_linear");
  app.add_option(both("hidden-dim"), s.hidden_dim, "model width d");
  app.add_option(both("blocks"), s.blocks, "transformer blocks");
  app.add_option(both("heads"), s.heads, "attention heads");
  app.add_option(both("max-len"), s.max_len, "joint sequence length L");
  app.add_option(both("frozen-dim"), s.frozen_dim, "width of the generated token table when --embeddings is absent");
  app.add_option(both("steps"), s.steps, "training steps");
  app.add_option(both("batch"), s.batch, "batch size");
  app.add_option(both("lr"), s.lr, "learning rate");
  app.add_option(both("weight-decay"), s.weight_decay, "decoupled weight decay");
  app.add_option(both("clip-norm"), s.clip_norm, "global gradient norm limit");
  app.add_option(both("checkpoint-interval"), s.checkpoint_interval, "steps between numbered checkpoints");
  app.add_option(both("split-mode"), s.split_mode, "new_sentence|new_reader|new_reader_new_sentence");
  app.add_option(both("folds"), s.folds, "cross-validation folds");
  app.add_option(both("workers"), s.workers, "worker threads");
  app.add_flag(both("mean-only"), s.mean_only, "use the posterior mean during generation");
  app.add_option(both("trace-stride"), s.trace_stride, "reverse steps between latent snapshots");

  app.add_option("--fixations", s.fixations, "fixation CSV");
  app.add_option("--sentences", s.sentences, "sentence CSV");
  app.add_option("--vocab", s.vocab, "token vocabulary");
  app.add_option("--embeddings", s.embeddings, "frozen token embedding table");
  app.add_option("--out", s.out, "output file or directory");
  app.add_option("--checkpoint", s.checkpoint, "model checkpoint");
  app.add_option("--splits", s.splits, "split plan written by prepare");
  app.add_option("--fold", s.fold, "fold index in the split plan");
  app.add_option("--true", s.truth, "reference fixation CSV");
  app.add_option("--pred", s.pred, "predicted fixation CSV (repeatable)");
  app.add_option("--predictors", s.predictors, "word predictor CSV for the word export");
  app.add_option(both("budget"), s.budget, "fixation slots per generated scanpath (0: fill)");
  app.add_option(both("sentence-id"), s.sentence_id, "sentence to trace");

  auto* prepare = app.add_subcommand("prepare", "validate a corpus and write a split plan")->fallthrough();
  auto* train_cmd = app.add_subcommand("train", "train a model")->fallthrough();
  auto* generate_cmd = app.add_subcommand("generate", "generate scanpaths from a checkpoint")->fallthrough();
  auto* evaluate = app.add_subcommand("evaluate", "compare predicted with reference scanpaths")->fallthrough();
  auto* baseline = app.add_subcommand("baseline", "uniform, train-label or human baseline")->fallthrough();
  baseline->add_option("kind", s.kind, "uniform|trainlabel|human")
      ->required()
      ->check(CLI::IsMember({"uniform", "trainlabel", "human"}));
  auto* dump = app.add_subcommand("schedule-dump", "print a noise schedule")->fallthrough();
  dump->add_option("--kind", s.kind, "schedule kind (defaults to --schedule)");
  auto* trace = app.add_subcommand("trace", "dump reverse-diffusion latents for one sentence")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*prepare) return cmd_prepare(s);
    if (*train_cmd) return cmd_train(s);
    if (*generate_cmd) return cmd_generate(s);
    if (*evaluate) return cmd_evaluate(s);
    if (*baseline) return cmd_baseline(s);
    if (*dump) return cmd_schedule_dump(s);
    if (*trace) return cmd_trace(s);
  } catch (const ValidationError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 1;
}
