#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace scanpath {

/// Token vocabulary; the token ID is the 0-based line number in the file.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  static Vocabulary load(const std::filesystem::path& path);

  int size() const { return static_cast<int>(tokens_.size()); }
  bool contains(const std::string& token) const { return ids_.contains(token); }
  int id(const std::string& token) const;  // throws ConfigError when absent
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }

  int pad_id() const { return id("[PAD]"); }
  int unk_id() const { return id("[UNK]"); }
  int cls_id() const { return id("[CLS]"); }
  int sep_id() const { return id("[SEP]"); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

struct TokenizedSentence {
  std::vector<int> subword_ids;
  std::vector<int> word_alignment;  // subword position -> 1-based word index
  int word_count = 0;

  bool operator==(const TokenizedSentence&) const = default;
};

/// Greedy longest-match-first WordPiece. Continuation pieces carry a "##"
/// prefix; a word with no full segmentation maps to a single [UNK]. No case
/// folding or accent stripping is applied.
TokenizedSentence wordpiece_tokenize(const std::vector<std::string>& words, const Vocabulary& vocab);

}  // namespace scanpath
