#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "scanpath/corpus.hpp"

namespace scanpath {

enum class SplitMode { NewSentence, NewReader, NewReaderNewSentence };

SplitMode parse_split_mode(const std::string& name);
std::string to_string(SplitMode mode);

using RecordKey = std::pair<std::string, std::string>;  // (reader_id, sentence_id)

struct Fold {
  std::vector<RecordKey> train;
  std::vector<RecordKey> test;
  std::vector<std::string> held_out_readers;
  std::vector<std::string> held_out_sentences;
};

struct SplitPlan {
  SplitMode mode = SplitMode::NewSentence;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;
};

/// k-fold plan over the held-out dimension(s). Unit IDs are sorted, shuffled
/// with the seed and dealt into k near-equal groups. In the combined mode a
/// fold trains on records whose reader and sentence are both outside the
/// held-out groups; records sharing only one held-out dimension are unused.
SplitPlan make_splits(const Corpus& corpus, SplitMode mode, int k, std::uint64_t seed);

void save_splits(const SplitPlan& plan, const std::filesystem::path& path);
SplitPlan load_splits(const std::filesystem::path& path);

/// Record indices of `corpus` whose keys are listed.
std::vector<std::size_t> select_records(const Corpus& corpus, const std::vector<RecordKey>& keys);

}  // namespace scanpath
