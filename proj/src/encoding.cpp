#include "scanpath/encoding.hpp"

#include <algorithm>
#include <string>

#include "scanpath/error.hpp"

namespace scanpath {

namespace {

EncodedInstance blank(int max_len, int pad) {
  EncodedInstance inst;
  const auto n = static_cast<std::size_t>(max_len);
  inst.seq_len = max_len;
  inst.x_idx.assign(n, 0);
  inst.x_bert.assign(n, pad);
  inst.x_pos.assign(n, 0);
  inst.condition_mask.assign(n, false);
  inst.target_mask.assign(n, false);
  inst.pad_mask.assign(n, false);
  return inst;
}

void place_condition(EncodedInstance& inst, const TokenizedSentence& tok, const SpecialTokens& sp) {
  const int m = tok.word_count;
  inst.word_count = m;
  std::size_t row = 0;
  auto put = [&](int idx, int bert, int pos) {
    inst.x_idx[row] = idx;
    inst.x_bert[row] = bert;
    inst.x_pos[row] = pos;
    inst.condition_mask[row] = true;
    inst.pad_mask[row] = true;
    ++row;
  };
  put(0, sp.cls, 0);
  for (std::size_t i = 0; i < tok.subword_ids.size(); ++i)
    put(tok.word_alignment[i], tok.subword_ids[i], static_cast<int>(i) + 1);
  put(m + 1, sp.sep, static_cast<int>(tok.subword_ids.size()) + 1);
  inst.condition_length = static_cast<int>(row);
}

void place_target(EncodedInstance& inst, std::span<const int> body, const SpecialTokens& sp) {
  auto row = static_cast<std::size_t>(inst.condition_length);
  int pos = 0;
  auto put = [&](int idx) {
    inst.x_idx[row] = idx;
    inst.x_bert[row] = sp.pad;
    inst.x_pos[row] = pos++;
    inst.target_mask[row] = true;
    inst.pad_mask[row] = true;
    ++row;
  };
  put(0);
  for (int f : body) put(f);
  put(inst.word_count + 1);
  inst.target_length = pos;
}

void check_fits(const TokenizedSentence& tok, std::size_t body, int max_len) {
  const std::size_t needed = tok.subword_ids.size() + body + 4;
  if (needed > static_cast<std::size_t>(max_len))
    throw LengthError("sequence needs " + std::to_string(needed) + " positions, max length is " +
                      std::to_string(max_len));
}

}  // namespace

int condition_length(const TokenizedSentence& tok) {
  return static_cast<int>(tok.subword_ids.size()) + 2;
}

int default_target_budget(const TokenizedSentence& tok, int max_len) {
  return max_len - condition_length(tok) - 2;
}

EncodedInstance encode_instance(const TokenizedSentence& tok, std::span<const int> fixations,
                                int max_len, const SpecialTokens& specials) {
  check_fits(tok, fixations.size(), max_len);
  for (int f : fixations)
    if (f < 1 || f > tok.word_count)
      throw ValidationError("fixation index " + std::to_string(f) + " outside [1, " +
                            std::to_string(tok.word_count) + "]");
  auto inst = blank(max_len, specials.pad);
  place_condition(inst, tok, specials);
  place_target(inst, fixations, specials);
  return inst;
}

EncodedInstance encode_placeholder(const TokenizedSentence& tok, int target_budget, int max_len,
                                   const SpecialTokens& specials) {
  if (target_budget < 1) throw LengthError("target budget must be positive");
  check_fits(tok, static_cast<std::size_t>(target_budget), max_len);
  auto inst = blank(max_len, specials.pad);
  place_condition(inst, tok, specials);
  std::vector<int> zeros(static_cast<std::size_t>(target_budget), 0);
  place_target(inst, zeros, specials);
  return inst;
}

EncodedInstance fill_target_region(const EncodedInstance& inst, int target_budget) {
  const int span = target_budget + 2;
  if (span < inst.target_length) throw LengthError("target budget smaller than the scanpath");
  if (inst.condition_length + span > inst.seq_len) throw LengthError("target budget exceeds max length");
  EncodedInstance out = inst;
  for (int p = inst.target_length; p < span; ++p) {
    const auto row = static_cast<std::size_t>(inst.condition_length + p);
    out.x_idx[row] = 0;
    out.x_pos[row] = p;
    out.target_mask[row] = true;
    out.pad_mask[row] = true;
  }
  out.target_length = span;
  return out;
}

std::vector<int> decode_fixations(const EncodedInstance& inst) {
  std::vector<int> out;
  for (int p = 1; p < inst.target_length; ++p) {
    const int v = inst.x_idx[static_cast<std::size_t>(inst.condition_length + p)];
    if (v == inst.sep_index()) break;
    if (v != 0) out.push_back(v);
  }
  return out;
}

std::vector<int> decode_prediction(std::span<const int> target_indices, int word_count,
                                   int target_budget, DecodeReport* report) {
  DecodeReport local;
  std::vector<int> out;
  const std::size_t last = std::min(target_indices.size(), static_cast<std::size_t>(target_budget) + 1);
  for (std::size_t p = 1; p < last; ++p) {
    int v = target_indices[p];
    if (v == word_count + 1) break;
    if (v <= 0) continue;
    if (v > word_count) {
      v = word_count;
      ++local.clamped;
    }
    out.push_back(v);
  }
  if (out.empty()) {
    out.push_back(1);
    local.empty_fallback = true;
  }
  if (report) *report = local;
  return out;
}

}  // namespace scanpath
