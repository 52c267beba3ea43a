#include "scanpath/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "scanpath/error.hpp"
#include "scanpath/inference.hpp"
#include "scanpath/metrics.hpp"
#include "scanpath/rng.hpp"

namespace scanpath {

EmpiricalDistribution EmpiricalDistribution::from(const Corpus& corpus) {
  EmpiricalDistribution d;
  for (const auto& rec : corpus.scanpaths) {
    d.lengths.push_back(static_cast<int>(rec.fixations.size()));
    for (std::size_t i = 1; i < rec.fixations.size(); ++i)
      d.saccades.push_back(rec.fixations[i] - rec.fixations[i - 1]);
  }
  return d;
}

int EmpiricalDistribution::sample_length(Rng& rng) const {
  if (lengths.empty()) throw ValidationError("empty scanpath length distribution");
  return lengths[rng.below(lengths.size())];
}

int EmpiricalDistribution::sample_saccade(Rng& rng) const {
  if (saccades.empty()) throw ValidationError("empty saccade distribution");
  return saccades[rng.below(saccades.size())];
}

std::vector<int> uniform_baseline(int word_count, const EmpiricalDistribution& dist, Rng& rng) {
  if (word_count < 1) throw ValidationError("sentence must have at least one word");
  const int n = std::max(1, dist.sample_length(rng));
  std::vector<int> path(static_cast<std::size_t>(n));
  for (int& f : path) f = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(word_count)));
  return path;
}

std::vector<int> trainlabel_baseline(int word_count, const EmpiricalDistribution& dist, Rng& rng) {
  if (word_count < 1) throw ValidationError("sentence must have at least one word");
  const int n = std::max(1, dist.sample_length(rng));
  std::vector<int> path{1};
  int pos = 1;
  while (static_cast<int>(path.size()) < n) {
    pos = std::clamp(pos + dist.sample_saccade(rng), 1, word_count);
    path.push_back(pos);
  }
  return path;
}

Corpus baseline_corpus(BaselineKind kind, const EmpiricalDistribution& dist,
                       const std::map<std::string, std::vector<std::string>>& sentences, std::uint64_t seed) {
  const std::string name = kind == BaselineKind::Uniform ? "uniform" : "trainlabel";
  Corpus out;
  out.sentences = sentences;
  for (const auto& [id, words] : sentences) {
    Rng rng(sentence_seed(seed, id));
    const int m = static_cast<int>(words.size());
    auto path = kind == BaselineKind::Uniform ? uniform_baseline(m, dist, rng) : trainlabel_baseline(m, dist, rng);
    out.scanpaths.push_back({name, id, std::move(path)});
  }
  if (!out.scanpaths.empty()) out.readers.insert(name);
  return out;
}

HumanBaseline human_baseline(const Corpus& corpus) {
  std::map<std::string, std::vector<const ScanpathRecord*>> by_sentence;
  for (const auto& rec : corpus.scanpaths) by_sentence[rec.sentence_id].push_back(&rec);

  std::vector<double> per_scanpath;
  for (const auto& [id, recs] : by_sentence) {
    for (const auto* a : recs) {
      double sum = 0.0;
      int n = 0;
      for (const auto* b : recs) {
        if (b->reader_id == a->reader_id) continue;
        sum += nld(a->fixations, b->fixations);
        ++n;
      }
      if (n > 0) per_scanpath.push_back(sum / n);
    }
  }
  if (per_scanpath.empty()) throw ValidationError("human baseline needs two readers on at least one sentence");

  HumanBaseline h;
  h.scanpaths = per_scanpath.size();
  const double n = static_cast<double>(h.scanpaths);
  for (double v : per_scanpath) h.mean += v;
  h.mean /= n;
  if (h.scanpaths > 1) {
    double ss = 0.0;
    for (double v : per_scanpath) ss += (v - h.mean) * (v - h.mean);
    h.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return h;
}

}  // namespace scanpath
