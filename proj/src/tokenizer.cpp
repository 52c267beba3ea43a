#include "scanpath/tokenizer.hpp"

#include <fstream>

#include "scanpath/error.hpp"

namespace scanpath {

namespace {
constexpr std::size_t kMaxCharsPerWord = 100;
constexpr const char* kContinuation = "##";
}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) ids_.emplace(tokens_[i], static_cast<int>(i));
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary " + path.string());
  std::vector<std::string> tokens;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  Vocabulary vocab(std::move(tokens));
  for (const char* special : {"[UNK]", "[PAD]", "[CLS]", "[SEP]"})
    if (!vocab.contains(special))
      throw ConfigError("vocabulary " + path.string() + " lacks required token " + special);
  return vocab;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) throw ConfigError("token '" + token + "' not in vocabulary");
  return it->second;
}

TokenizedSentence wordpiece_tokenize(const std::vector<std::string>& words, const Vocabulary& vocab) {
  const int unk = vocab.unk_id();
  TokenizedSentence out;
  out.word_count = static_cast<int>(words.size());
  std::vector<int> pieces;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::string& word = words[w];
    const int word_index = static_cast<int>(w) + 1;
    pieces.clear();
    bool bad = word.size() > kMaxCharsPerWord;
    std::size_t start = 0;
    while (!bad && start < word.size()) {
      std::size_t end = word.size();
      int match = -1;
      while (start < end) {
        std::string candidate = word.substr(start, end - start);
        if (start > 0) candidate = kContinuation + candidate;
        if (vocab.contains(candidate)) {
          match = vocab.id(candidate);
          break;
        }
        --end;
      }
      if (match < 0) {
        bad = true;
        break;
      }
      pieces.push_back(match);
      start = end;
    }
    if (bad) {
      pieces.assign(1, unk);
    }
    for (int id : pieces) {
      out.subword_ids.push_back(id);
      out.word_alignment.push_back(word_index);
    }
  }
  return out;
}

}  // namespace scanpath
