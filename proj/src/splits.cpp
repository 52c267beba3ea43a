#include "scanpath/splits.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

#include "scanpath/error.hpp"
#include "scanpath/rng.hpp"

namespace scanpath {

SplitMode parse_split_mode(const std::string& name) {
  if (name == "new_sentence") return SplitMode::NewSentence;
  if (name == "new_reader") return SplitMode::NewReader;
  if (name == "new_reader_new_sentence") return SplitMode::NewReaderNewSentence;
  throw ConfigError("unknown split mode '" + name + "'");
}

std::string to_string(SplitMode mode) {
  switch (mode) {
    case SplitMode::NewSentence: return "new_sentence";
    case SplitMode::NewReader: return "new_reader";
    case SplitMode::NewReaderNewSentence: return "new_reader_new_sentence";
  }
  return "?";
}

namespace {

std::vector<std::vector<std::string>> deal(std::set<std::string> units, int k, Rng& rng) {
  std::vector<std::string> ids(units.begin(), units.end());  // sorted
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
  std::vector<std::vector<std::string>> groups(static_cast<std::size_t>(k));
  // Contiguous chunks whose sizes differ by at most one.
  const std::size_t n = ids.size();
  std::size_t pos = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t size = n / groups.size() + (g < n % groups.size() ? 1 : 0);
    groups[g].assign(ids.begin() + static_cast<std::ptrdiff_t>(pos),
                     ids.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(groups[g].begin(), groups[g].end());
    pos += size;
  }
  return groups;
}

}  // namespace

SplitPlan make_splits(const Corpus& corpus, SplitMode mode, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  std::set<std::string> readers, sentences;
  for (const auto& r : corpus.scanpaths) {
    readers.insert(r.reader_id);
    sentences.insert(r.sentence_id);
  }
  const bool by_reader = mode != SplitMode::NewSentence;
  const bool by_sentence = mode != SplitMode::NewReader;
  if (by_reader && readers.size() < static_cast<std::size_t>(k))
    throw ValidationError("cannot build " + std::to_string(k) + " folds: only " +
                          std::to_string(readers.size()) + " distinct readers");
  if (by_sentence && sentences.size() < static_cast<std::size_t>(k))
    throw ValidationError("cannot build " + std::to_string(k) + " folds: only " +
                          std::to_string(sentences.size()) + " distinct sentences");

  Rng rng(seed);
  std::vector<std::vector<std::string>> reader_groups, sentence_groups;
  if (by_reader) reader_groups = deal(readers, k, rng);
  if (by_sentence) sentence_groups = deal(sentences, k, rng);

  SplitPlan plan;
  plan.mode = mode;
  plan.seed = seed;
  for (int f = 0; f < k; ++f) {
    Fold fold;
    std::set<std::string> test_readers, test_sentences;
    if (by_reader) {
      fold.held_out_readers = reader_groups[static_cast<std::size_t>(f)];
      test_readers.insert(fold.held_out_readers.begin(), fold.held_out_readers.end());
    }
    if (by_sentence) {
      fold.held_out_sentences = sentence_groups[static_cast<std::size_t>(f)];
      test_sentences.insert(fold.held_out_sentences.begin(), fold.held_out_sentences.end());
    }
    for (const auto& r : corpus.scanpaths) {
      const bool reader_out = test_readers.contains(r.reader_id);
      const bool sentence_out = test_sentences.contains(r.sentence_id);
      RecordKey key{r.reader_id, r.sentence_id};
      switch (mode) {
        case SplitMode::NewSentence:
          (sentence_out ? fold.test : fold.train).push_back(key);
          break;
        case SplitMode::NewReader:
          (reader_out ? fold.test : fold.train).push_back(key);
          break;
        case SplitMode::NewReaderNewSentence:
          if (reader_out && sentence_out) fold.test.push_back(key);
          else if (!reader_out && !sentence_out) fold.train.push_back(key);
          break;
      }
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

void save_splits(const SplitPlan& plan, const std::filesystem::path& path) {
  nlohmann::json j;
  j["mode"] = to_string(plan.mode);
  j["seed"] = plan.seed;
  j["folds"] = nlohmann::json::array();
  for (const auto& f : plan.folds) {
    nlohmann::json jf;
    jf["held_out_readers"] = f.held_out_readers;
    jf["held_out_sentences"] = f.held_out_sentences;
    jf["train"] = f.train;
    jf["test"] = f.test;
    j["folds"].push_back(std::move(jf));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

SplitPlan load_splits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    SplitPlan plan;
    plan.mode = parse_split_mode(j.at("mode").get<std::string>());
    plan.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jf : j.at("folds")) {
      Fold f;
      jf.at("held_out_readers").get_to(f.held_out_readers);
      jf.at("held_out_sentences").get_to(f.held_out_sentences);
      jf.at("train").get_to(f.train);
      jf.at("test").get_to(f.test);
      plan.folds.push_back(std::move(f));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed split file " + path.string() + ": " + e.what());
  }
}

std::vector<std::size_t> select_records(const Corpus& corpus, const std::vector<RecordKey>& keys) {
  std::set<RecordKey> wanted(keys.begin(), keys.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < corpus.scanpaths.size(); ++i) {
    const auto& r = corpus.scanpaths[i];
    if (wanted.contains({r.reader_id, r.sentence_id})) out.push_back(i);
  }
  return out;
}

}  // namespace scanpath
