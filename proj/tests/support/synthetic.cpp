#include "synthetic.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "scanpath/embedding.hpp"
#include "scanpath/rng.hpp"

namespace scanpath::testing {

Vocabulary make_vocab(const std::vector<std::string>& tokens) {
  std::vector<std::string> all{"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
  all.insert(all.end(), tokens.begin(), tokens.end());
  return Vocabulary(std::move(all));
}

SyntheticSet rule_corpus(int sentences, std::uint64_t seed, int max_fixations) {
  Rng rng(seed);
  SyntheticSet set;
  std::set<std::string> words;
  for (int s = 0; s < sentences; ++s) {
    const int m = 5 + static_cast<int>(rng.below(6));
    std::vector<std::string> sentence;
    for (int w = 0; w < m; ++w) {
      const int len = 1 + static_cast<int>(rng.below(10));
      std::string word;
      for (int c = 0; c < len; ++c) word += static_cast<char>('a' + rng.below(26));
      words.insert(word);
      sentence.push_back(word);
    }
    char id[16];
    std::snprintf(id, sizeof id, "s%02d", s);
    set.corpus.sentences.emplace(id, sentence);

    std::vector<int> plain;
    std::vector<int> refixated;
    for (int w = 1; w <= m; ++w) {
      const auto len = sentence[static_cast<std::size_t>(w - 1)].size();
      if (len <= 2 && w != 1) continue;
      plain.push_back(w);
      refixated.push_back(w);
      if (len >= 8 && static_cast<int>(refixated.size()) < max_fixations - (m - w)) refixated.push_back(w);
    }
    set.corpus.scanpaths.push_back({"r1", id, refixated});
    set.corpus.scanpaths.push_back({"r2", id, plain});
  }
  set.corpus.readers = {"r1", "r2"};
  set.vocab = make_vocab(std::vector<std::string>(words.begin(), words.end()));
  return set;
}

ModelParams tiny_model(int vocab_size, int max_len, int hidden_dim, int blocks, int heads, std::uint64_t seed,
                       int frozen_dim) {
  ModelConfig mc;
  mc.max_len = max_len;
  mc.denoiser.hidden_dim = hidden_dim;
  mc.denoiser.blocks = blocks;
  mc.denoiser.heads = heads;
  auto frozen = std::make_shared<const Matrix>(random_frozen_table(vocab_size, frozen_dim, seed + 7));
  return init_model(mc, frozen, seed);
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scanpath_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace scanpath::testing
