#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scanpath/corpus.hpp"

namespace scanpath {

struct Correlation {
  bool defined = false;  // false when either sample has zero variance
  double r = 0.0;
  double p = 1.0;        // two-sided, t-distribution with n - 2 degrees of freedom
  std::size_t n = 0;
};

/// Throws ValidationError unless xs and ys have equal length >= 3.
Correlation pearson(std::span<const double> xs, std::span<const double> ys);

/// Pairs each true scanpath with a prediction for the same sentence: the one
/// by the same reader when present, otherwise the first for that sentence.
struct PairedNld {
  std::string reader_id;
  std::string sentence_id;
  double nld = 0.0;
};
std::vector<PairedNld> paired_nld(const Corpus& truth, const Corpus& predicted);

struct Generator {
  std::string name;
  Corpus corpus;
};

struct ReportSummary {
  std::vector<std::pair<std::string, double>> mean_nld;  // per generator
  std::vector<std::pair<std::string, double>> nld_standard_error;
};

/// Writes the report tables into `out_dir`:
///   nld_per_scanpath.csv, measures_summary.csv, reader_correlations.csv,
///   nld_measure_correlations.csv, sentence_nld_correlations.csv,
///   word_measures.csv (joined with predictors when given).
ReportSummary write_report(const Corpus& truth, const std::vector<Generator>& generators,
                           const std::filesystem::path& out_dir, const std::optional<PredictorTable>& predictors = {});

}  // namespace scanpath
