#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scanpath/corpus.hpp"

namespace scanpath {

class Rng;

/// Scanpath lengths and signed saccades observed in a training corpus.
/// Sampling draws one observation uniformly, i.e. from the empirical
/// distribution.
struct EmpiricalDistribution {
  std::vector<int> lengths;
  std::vector<int> saccades;

  static EmpiricalDistribution from(const Corpus& corpus);

  int sample_length(Rng& rng) const;
  int sample_saccade(Rng& rng) const;
};

/// A length from the training distribution, every fixation uniform on [1, M].
std::vector<int> uniform_baseline(int word_count, const EmpiricalDistribution& dist, Rng& rng);

/// Starts on word 1 and walks by sampled saccades, clamping into [1, M],
/// until the sampled length is reached.
std::vector<int> trainlabel_baseline(int word_count, const EmpiricalDistribution& dist, Rng& rng);

enum class BaselineKind { Uniform, TrainLabel };

/// One baseline scanpath per sentence, reader id "uniform" or "trainlabel".
/// Seeds are derived per sentence.
Corpus baseline_corpus(BaselineKind kind, const EmpiricalDistribution& dist,
                       const std::map<std::string, std::vector<std::string>>& sentences, std::uint64_t seed);

struct HumanBaseline {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t scanpaths = 0;
};

/// Inter-reader similarity: for every scanpath, the mean NLD to the other
/// readers' scanpaths on the same sentence, then mean and standard error over
/// scanpaths. Throws ValidationError when no sentence has two readers.
HumanBaseline human_baseline(const Corpus& corpus);

}  // namespace scanpath
