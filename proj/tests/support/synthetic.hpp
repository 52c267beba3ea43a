#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "scanpath/corpus.hpp"
#include "scanpath/model.hpp"
#include "scanpath/tokenizer.hpp"

namespace scanpath::testing {

/// Specials followed by the given tokens in order.
Vocabulary make_vocab(const std::vector<std::string>& tokens);

struct SyntheticSet {
  Corpus corpus;
  Vocabulary vocab;
};

/// Random lowercase sentences of 5..10 words (word length 1..10) read by two
/// rule-following readers. Reader "r1" reads left to right, skips short
/// words (length <= 2, never the first word) and refixates long ones
/// (length >= 8). Reader "r2" follows the same rule without refixations.
/// Scanpaths are kept within `max_fixations` by dropping refixations.
SyntheticSet rule_corpus(int sentences, std::uint64_t seed, int max_fixations);

ModelParams tiny_model(int vocab_size, int max_len, int hidden_dim, int blocks, int heads, std::uint64_t seed,
                       int frozen_dim = 8);

/// Fresh empty directory under the system temp directory.
std::filesystem::path fresh_dir(const std::string& name);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace scanpath::testing
