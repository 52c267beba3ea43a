#include "scanpath/reading_measures.hpp"

#include <cstdlib>
#include <set>
#include <string>

#include "scanpath/error.hpp"

namespace scanpath {

ReadingMeasures reading_measures(std::span<const int> fixations, int word_count) {
  if (word_count < 1) throw ValidationError("word count must be positive");
  for (int f : fixations)
    if (f < 1 || f > word_count)
      throw ValidationError("fixation " + std::to_string(f) + " outside [1, " + std::to_string(word_count) + "]");

  const auto m = static_cast<std::size_t>(word_count);
  ReadingMeasures r;
  r.fpr.assign(m, 0);
  r.sr.assign(m, 0);
  r.ffc.assign(m, 0);
  r.tfc.assign(m, 0);
  std::vector<bool> fixated(m, false);
  std::set<int> regression_starts;

  int frontier = 0;
  double prog_sum = 0.0, regr_sum = 0.0;
  int prog_n = 0, regr_n = 0;
  const std::size_t n = fixations.size();
  std::size_t i = 0;
  while (i < n) {
    const int w = fixations[i];
    // A run of consecutive fixations on one word is a single visit.
    std::size_t end = i;
    while (end < n && fixations[end] == w) ++end;
    const auto run = static_cast<int>(end - i);
    const auto wi = static_cast<std::size_t>(w - 1);

    if (w > frontier) {
      for (int skipped = frontier + 1; skipped < w; ++skipped)
        if (!fixated[static_cast<std::size_t>(skipped - 1)]) r.sr[static_cast<std::size_t>(skipped - 1)] = 1;
      if (!fixated[wi]) {
        r.ffc[wi] = run;
        if (end < n && fixations[end] < w) r.fpr[wi] = 1;
      }
      frontier = w;
    }
    fixated[wi] = true;
    r.tfc[wi] += run;

    if (end < n) {
      const int delta = fixations[end] - w;
      if (delta > 0) {
        prog_sum += delta;
        ++prog_n;
      } else {
        regr_sum += -delta;
        ++regr_n;
        regression_starts.insert(w);
      }
    }
    i = end;
  }

  const double md = static_cast<double>(word_count);
  int skipped = 0, first_pass = 0;
  for (std::size_t k = 0; k < m; ++k) {
    skipped += r.sr[k];
    first_pass += r.ffc[k];
  }
  r.regression_rate = static_cast<double>(regression_starts.size()) / md;
  r.normalized_fixation_count = static_cast<double>(n) / md;
  r.progressive_saccade_len = prog_n > 0 ? prog_sum / prog_n : 0.0;
  r.regressive_saccade_len = regr_n > 0 ? regr_sum / regr_n : 0.0;
  r.skipping_rate = skipped / md;
  r.first_pass_count = first_pass / md;
  return r;
}

}  // namespace scanpath
