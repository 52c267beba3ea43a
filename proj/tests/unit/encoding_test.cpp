#include "doctest.h"

#include "../support/synthetic.hpp"
#include "scanpath/encoding.hpp"
#include "scanpath/error.hpp"
#include "scanpath/rng.hpp"

using namespace scanpath;
namespace st = scanpath::testing;

TEST_CASE("two-word sentence with a regression, built by hand") {
  const auto vocab = st::make_vocab({"a", "b"});
  const auto sp = SpecialTokens::from(vocab);
  const auto tok = wordpiece_tokenize({"a", "b"}, vocab);
  const auto e = encode_instance(tok, std::vector<int>{1, 2, 1}, 12, sp);
  const int cls = sp.cls, sep = sp.sep, pad = sp.pad, a = vocab.id("a"), b = vocab.id("b");
  CHECK(e.x_idx == std::vector<int>{0, 1, 2, 3, 0, 1, 2, 1, 3, 0, 0, 0});
  CHECK(e.x_pos == std::vector<int>{0, 1, 2, 3, 0, 1, 2, 3, 4, 0, 0, 0});
  CHECK(e.x_bert == std::vector<int>{cls, a, b, sep, pad, pad, pad, pad, pad, pad, pad, pad});
  CHECK(e.condition_length == 4);
  CHECK(e.target_length == 5);
}

TEST_CASE("subword pieces share their word index") {
  const auto vocab = st::make_vocab({"cat", "##s"});
  const auto e = encode_instance(wordpiece_tokenize({"cats"}, vocab), std::vector<int>{1}, 10, SpecialTokens::from(vocab));
  CHECK(e.x_idx[1] == 1);
  CHECK(e.x_idx[2] == 1);
  CHECK(e.x_idx[3] == 2);  // SEP of a one-word sentence
}

TEST_CASE("placeholder target region") {
  const auto vocab = st::make_vocab({"a", "b"});
  const auto e = encode_placeholder(wordpiece_tokenize({"a", "b"}, vocab), 5, 16, SpecialTokens::from(vocab));
  int target = 0;
  for (int i = 0; i < e.seq_len; ++i) {
    if (!e.target_mask[static_cast<std::size_t>(i)]) continue;
    ++target;
    const int local = i - e.target_begin();
    if (local == 0) CHECK(e.x_idx[static_cast<std::size_t>(i)] == 0);
    else if (local == 6) CHECK(e.x_idx[static_cast<std::size_t>(i)] == 3);
    else CHECK(e.x_idx[static_cast<std::size_t>(i)] == 0);
  }
  CHECK(target == 7);
}

TEST_CASE("overlong input is a length error") {
  const auto vocab = st::make_vocab({"a"});
  const auto tok = wordpiece_tokenize({"a", "a", "a"}, vocab);
  CHECK_THROWS_AS(encode_instance(tok, std::vector<int>{1, 2, 3, 1, 2}, 8, SpecialTokens::from(vocab)), LengthError);
}

TEST_CASE("masks partition the real positions and decoding inverts encoding") {
  const auto set = st::rule_corpus(20, 12, 20);
  const auto sp = SpecialTokens::from(set.vocab);
  for (const auto& rec : set.corpus.scanpaths) {
    const auto tok = wordpiece_tokenize(set.corpus.sentences.at(rec.sentence_id), set.vocab);
    const auto e = encode_instance(tok, rec.fixations, 40, sp);
    REQUIRE(e.x_idx.size() == 40);
    REQUIRE(e.pad_mask.size() == 40);
    for (std::size_t i = 0; i < 40; ++i) {
      CHECK_FALSE((e.condition_mask[i] && e.target_mask[i]));
      CHECK((e.condition_mask[i] || e.target_mask[i]) == e.pad_mask[i]);
      if (!e.pad_mask[i]) {
        CHECK(e.x_bert[i] == sp.pad);
        CHECK(e.x_idx[i] == 0);
        CHECK(e.x_pos[i] == 0);
      }
    }
    CHECK(decode_fixations(e) == rec.fixations);
  }
}

TEST_CASE("filled target region matches the inference layout") {
  const auto vocab = st::make_vocab({"a", "b", "c"});
  const auto sp = SpecialTokens::from(vocab);
  const auto tok = wordpiece_tokenize({"a", "b", "c"}, vocab);
  const auto e = encode_instance(tok, std::vector<int>{1, 3}, 16, sp);
  const int budget = default_target_budget(tok, 16);
  CHECK(budget == 16 - 5 - 2);
  const auto filled = fill_target_region(e, budget);
  const auto placeholder = encode_placeholder(tok, budget, 16, sp);
  CHECK(filled.target_mask == placeholder.target_mask);
  CHECK(filled.pad_mask == placeholder.pad_mask);
  CHECK(filled.x_pos == placeholder.x_pos);
  CHECK(decode_fixations(filled) == std::vector<int>{1, 3});
}

TEST_CASE("prediction decoding rules") {
  DecodeReport r;
  // CLS slot ignored, stop at SEP (M + 1 = 4), zeros dropped.
  CHECK(decode_prediction(std::vector<int>{2, 1, 0, 2, 4, 3}, 3, 4, &r) == std::vector<int>{1, 2});
  CHECK(r.clamped == 0);
  // Indices above M + 1 are clamped to M.
  CHECK(decode_prediction(std::vector<int>{0, 7, 2, 9}, 3, 3, &r) == std::vector<int>{3, 2, 3});
  CHECK(r.clamped == 2);
  // Nothing left: a single fixation on word 1.
  CHECK(decode_prediction(std::vector<int>{0, 4, 2, 2}, 3, 3, &r) == std::vector<int>{1});
  CHECK(r.empty_fallback);
  // Output never exceeds the budget.
  CHECK(decode_prediction(std::vector<int>{0, 1, 2, 3, 1, 2}, 3, 3).size() <= 3);
}
