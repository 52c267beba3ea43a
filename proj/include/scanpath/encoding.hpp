#pragma once

#include <span>
#include <vector>

#include "scanpath/tokenizer.hpp"

namespace scanpath {

struct SpecialTokens {
  int pad = 0;
  int cls = 0;
  int sep = 0;

  static SpecialTokens from(const Vocabulary& vocab) {
    return {vocab.pad_id(), vocab.cls_id(), vocab.sep_id()};
  }
};

/// Discrete model input: the sentence subsequence [CLS w.. SEP] followed by
/// the fixation subsequence [CLS f.. SEP], padded to a fixed length. Each
/// position carries a word index, a token ID and a position index.
struct EncodedInstance {
  std::vector<int> x_idx;
  std::vector<int> x_bert;
  std::vector<int> x_pos;
  std::vector<bool> condition_mask;
  std::vector<bool> target_mask;
  std::vector<bool> pad_mask;  // true on real tokens

  int seq_len = 0;
  int word_count = 0;
  int condition_length = 0;  // rows [0, condition_length) hold the sentence
  int target_length = 0;     // rows [condition_length, condition_length + target_length)

  int target_begin() const { return condition_length; }
  int sep_index() const { return word_count + 1; }
};

/// Sentence rows plus the 4 specials; throws LengthError beyond max_len.
int condition_length(const TokenizedSentence& tok);

/// Placeholder positions available for fixations once the sentence and the
/// two target specials are placed.
int default_target_budget(const TokenizedSentence& tok, int max_len);

EncodedInstance encode_instance(const TokenizedSentence& tok, std::span<const int> fixations,
                                int max_len, const SpecialTokens& specials);

/// Inference form: `target_budget` placeholder rows (word index 0) between the
/// target CLS and SEP.
EncodedInstance encode_placeholder(const TokenizedSentence& tok, int target_budget, int max_len,
                                   const SpecialTokens& specials);

/// Extends the target region after its SEP with filler rows (word index 0,
/// PAD token, consecutive positions) until it spans `target_budget + 2` rows,
/// matching the layout seen at inference.
EncodedInstance fill_target_region(const EncodedInstance& inst, int target_budget);

/// Recovers the fixation sequence from the target region of a ground-truth
/// encoding.
std::vector<int> decode_fixations(const EncodedInstance& inst);

struct DecodeReport {
  int clamped = 0;
  bool empty_fallback = false;
};

/// Turns predicted word indices for the target rows into a scanpath: the CLS
/// row is ignored, reading stops at the first SEP index, index 0 is dropped,
/// anything above the sentence is clamped to its last word. An empty result
/// becomes a single fixation on word 1.
std::vector<int> decode_prediction(std::span<const int> target_indices, int word_count,
                                   int target_budget, DecodeReport* report = nullptr);

}  // namespace scanpath
