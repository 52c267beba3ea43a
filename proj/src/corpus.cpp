#include "scanpath/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "scanpath/error.hpp"

namespace scanpath {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream ss(text);
  std::vector<std::string> words;
  for (std::string w; ss >> w;) words.push_back(w);
  return words;
}

std::string record_name(const ScanpathRecord& r) {
  return "(reader '" + r.reader_id + "', sentence '" + r.sentence_id + "')";
}

}  // namespace

int Corpus::word_count(const std::string& sentence_id) const {
  auto it = sentences.find(sentence_id);
  if (it == sentences.end()) throw ValidationError("unknown sentence '" + sentence_id + "'");
  return static_cast<int>(it->second.size());
}

void validate(const Corpus& corpus) {
  for (const auto& [id, words] : corpus.sentences)
    if (words.empty()) throw ValidationError("sentence '" + id + "' has no words");
  for (const auto& r : corpus.scanpaths) {
    auto it = corpus.sentences.find(r.sentence_id);
    if (it == corpus.sentences.end())
      throw ValidationError("record " + record_name(r) + " references an unknown sentence");
    if (r.fixations.empty()) throw ValidationError("record " + record_name(r) + " has no fixations");
    const int m = static_cast<int>(it->second.size());
    for (int f : r.fixations)
      if (f < 1 || f > m)
        throw ValidationError("record " + record_name(r) + ": fixation index " + std::to_string(f) +
                              " outside [1, " + std::to_string(m) + "]");
    if (!corpus.readers.contains(r.reader_id))
      throw ValidationError("record " + record_name(r) + " has an unregistered reader");
  }
}

std::map<std::string, std::vector<std::string>> load_sentences(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::size_t line_no = 0;
  csv::expect_header(in, line_no, {"sentence_id", "text"}, path.string());
  std::map<std::string, std::vector<std::string>> sentences;
  std::string line;
  while (csv::next_line(in, line, line_no)) {
    auto fields = csv::split_line(line, line_no);
    if (fields.size() < 2) throw ParseError("expected 2 columns", line_no);
    // Unquoted commas inside the text are kept as part of the sentence.
    std::string text = fields[1];
    for (std::size_t i = 2; i < fields.size(); ++i) text += "," + fields[i];
    if (fields[0].empty()) throw ParseError("empty sentence_id", line_no);
    if (!sentences.emplace(fields[0], split_words(text)).second)
      throw ParseError("duplicate sentence_id '" + fields[0] + "'", line_no);
  }
  return sentences;
}

Corpus load_corpus(const std::filesystem::path& fixations_csv,
                   std::map<std::string, std::vector<std::string>> sentences) {
  Corpus corpus;
  corpus.sentences = std::move(sentences);
  auto in = open_input(fixations_csv);
  std::size_t line_no = 0;
  csv::expect_header(in, line_no, {"reader_id", "sentence_id", "fixation_word_index"},
                     fixations_csv.string());
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::string line;
  while (csv::next_line(in, line, line_no)) {
    auto fields = csv::split_line(line, line_no);
    if (fields.size() != 3)
      throw ParseError("expected 3 columns, got " + std::to_string(fields.size()), line_no);
    if (fields[0].empty() || fields[1].empty()) throw ParseError("empty identifier", line_no);
    const int fix = csv::parse_int(fields[2], line_no, "fixation_word_index");
    auto key = std::make_pair(fields[0], fields[1]);
    auto [it, inserted] = index.emplace(key, corpus.scanpaths.size());
    if (inserted) {
      corpus.scanpaths.push_back({fields[0], fields[1], {}});
      corpus.readers.insert(fields[0]);
    }
    corpus.scanpaths[it->second].fixations.push_back(fix);
  }
  validate(corpus);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& fixations_csv,
                   const std::filesystem::path& sentences_csv) {
  return load_corpus(fixations_csv, load_sentences(sentences_csv));
}

void write_fixations(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "reader_id,sentence_id,fixation_word_index\n";
  for (const auto& r : corpus.scanpaths)
    for (int f : r.fixations)
      out << csv::quote(r.reader_id) << ',' << csv::quote(r.sentence_id) << ',' << f << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_sentences(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "sentence_id,text\n";
  for (const auto& [id, words] : corpus.sentences) {
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    out << csv::quote(id) << ',' << csv::quote(text) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Corpus subset(const Corpus& corpus, const std::vector<std::size_t>& record_indices) {
  Corpus out;
  for (std::size_t i : record_indices) {
    const auto& r = corpus.scanpaths.at(i);
    out.scanpaths.push_back(r);
    out.readers.insert(r.reader_id);
    out.sentences.emplace(r.sentence_id, corpus.sentences.at(r.sentence_id));
  }
  return out;
}

PredictorTable load_predictors(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::size_t line_no = 0;
  csv::expect_header(in, line_no, {"sentence_id", "word_index", "word_length", "frequency", "surprisal"},
                     path.string());
  PredictorTable table;
  std::string line;
  while (csv::next_line(in, line, line_no)) {
    auto f = csv::split_line(line, line_no);
    if (f.size() != 5) throw ParseError("expected 5 columns", line_no);
    WordPredictors p{csv::parse_double(f[2], line_no, "word_length"),
                     csv::parse_double(f[3], line_no, "frequency"),
                     csv::parse_double(f[4], line_no, "surprisal")};
    table[{f[0], csv::parse_int(f[1], line_no, "word_index")}] = p;
  }
  return table;
}

}  // namespace scanpath
