#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace scanpath {

/// Word-level values are indexed by word position - 1.
struct ReadingMeasures {
  double regression_rate = 0.0;
  double normalized_fixation_count = 0.0;
  double progressive_saccade_len = 0.0;
  double regressive_saccade_len = 0.0;
  double skipping_rate = 0.0;
  double first_pass_count = 0.0;

  std::vector<int> fpr;  // first-pass regression launched from the word
  std::vector<int> sr;   // skipped in first pass
  std::vector<int> ffc;  // consecutive fixations on the first-pass visit
  std::vector<int> tfc;  // total fixations

  static constexpr std::array<std::string_view, 6> kNames{
      "regression_rate",        "normalized_fixation_count", "progressive_saccade_len",
      "regressive_saccade_len", "skipping_rate",             "first_pass_count"};

  std::array<double, 6> values() const {
    return {regression_rate,        normalized_fixation_count, progressive_saccade_len,
            regressive_saccade_len, skipping_rate,             first_pass_count};
  }
};

/// Measures on word indices. The first-pass frontier is the rightmost word
/// fixated so far; a word is skipped when a fixation lands beyond it before
/// it has been fixated. Fixations must lie in [1, word_count].
ReadingMeasures reading_measures(std::span<const int> fixations, int word_count);

}  // namespace scanpath
