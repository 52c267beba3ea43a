#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace scanpath {

/// One reader's fixation sequence on one sentence. Fixations are 1-based
/// word positions.
struct ScanpathRecord {
  std::string reader_id;
  std::string sentence_id;
  std::vector<int> fixations;

  bool operator==(const ScanpathRecord&) const = default;
};

struct Corpus {
  std::map<std::string, std::vector<std::string>> sentences;
  std::vector<ScanpathRecord> scanpaths;
  std::set<std::string> readers;

  int word_count(const std::string& sentence_id) const;
  bool operator==(const Corpus&) const = default;
};

/// Checks every record against its sentence; throws ValidationError naming
/// the offending record.
void validate(const Corpus& corpus);

std::map<std::string, std::vector<std::string>> load_sentences(const std::filesystem::path& path);

/// Loads `reader_id,sentence_id,fixation_word_index` rows. Rows are grouped by
/// (reader_id, sentence_id) in order of first appearance; fixation order is
/// row order within a group.
Corpus load_corpus(const std::filesystem::path& fixations_csv,
                   const std::filesystem::path& sentences_csv);

/// Same as load_corpus but with the sentence table already in memory.
Corpus load_corpus(const std::filesystem::path& fixations_csv,
                   std::map<std::string, std::vector<std::string>> sentences);

void write_fixations(const Corpus& corpus, const std::filesystem::path& path);
void write_sentences(const Corpus& corpus, const std::filesystem::path& path);

/// Sub-corpus holding the given records (by index) and the sentences they use.
Corpus subset(const Corpus& corpus, const std::vector<std::size_t>& record_indices);

/// Per-word predictors joined into exported word tables.
struct WordPredictors {
  double word_length = 0.0;
  double frequency = 0.0;
  double surprisal = 0.0;
};
using PredictorTable = std::map<std::pair<std::string, int>, WordPredictors>;

PredictorTable load_predictors(const std::filesystem::path& path);

}  // namespace scanpath
