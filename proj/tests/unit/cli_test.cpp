#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <sstream>
#include <string>

#include "../support/synthetic.hpp"
#include "scanpath/corpus.hpp"

namespace st = scanpath::testing;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(SCANPATH_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Files {
  std::filesystem::path dir, fix, sent, vocab;
};

Files corpus_files(const std::string& name) {
  Files f;
  f.dir = st::fresh_dir(name);
  const auto set = st::rule_corpus(5, 8, 12);
  f.fix = f.dir / "fix.csv";
  f.sent = f.dir / "sent.csv";
  f.vocab = f.dir / "vocab.txt";
  scanpath::write_fixations(set.corpus, f.fix);
  scanpath::write_sentences(set.corpus, f.sent);
  std::string v;
  for (int i = 0; i < set.vocab.size(); ++i) v += set.vocab.token(i) + "\n";
  st::write_file(f.vocab, v);
  return f;
}

}  // namespace

TEST_CASE("schedule dump of a short linear schedule") {
  const auto r = cli("schedule-dump --kind linear --t-max 4");
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == "t,beta,alpha,alpha_bar");
  CHECK(ls[1].rfind("1,0.0001,", 0) == 0);
  CHECK(ls[4].rfind("4,0.02,", 0) == 0);
}

TEST_CASE("config file values with flag overrides") {
  const auto dir = st::fresh_dir("cli_config");
  st::write_file(dir / "run.cfg", "t_max = 3\nschedule = linear\n");
  CHECK(lines(cli("schedule-dump --config " + (dir / "run.cfg").string()).out).size() == 4);
  CHECK(lines(cli("schedule-dump --config " + (dir / "run.cfg").string() + " --t-max 6").out).size() == 7);
  st::write_file(dir / "bad.cfg", "no_such_key = 1\n");
  CHECK(cli("schedule-dump --config " + (dir / "bad.cfg").string()).code == 1);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(cli("no-such-command").code == 1);
  CHECK(cli("schedule-dump --bogus-flag 3").code == 1);
  CHECK(cli("").code == 1);
  CHECK(cli("schedule-dump --schedule wavy").code == 1);
}

TEST_CASE("evaluating a corpus against itself") {
  const Files f = corpus_files("cli_eval");
  const auto r = cli("evaluate --true " + f.fix.string() + " --pred " + f.fix.string() + " --sentences " +
                     f.sent.string() + " --out " + (f.dir / "report").string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("mean_nld=0 ") != std::string::npos);
  CHECK(std::filesystem::exists(f.dir / "report" / "measures_summary.csv"));
}

TEST_CASE("invalid corpus exits with 1, unreadable input with 2") {
  const Files f = corpus_files("cli_errors");
  st::write_file(f.dir / "badfix.csv", "reader_id,sentence_id,fixation_word_index\nr1,s00,99\n");
  CHECK(cli("prepare --fixations " + (f.dir / "badfix.csv").string() + " --sentences " + f.sent.string() + " --out " +
            (f.dir / "p").string())
            .code == 1);
  CHECK(cli("evaluate --true " + (f.dir / "missing.csv").string() + " --pred " + f.fix.string() + " --sentences " +
            f.sent.string())
            .code == 2);
}

TEST_CASE("prepare, train, generate, baselines and trace") {
  const Files f = corpus_files("cli_pipeline");
  const std::string io = " --fixations " + f.fix.string() + " --sentences " + f.sent.string();
  const std::string model = " --t-max 10 --hidden-dim 8 --blocks 1 --heads 2 --max-len 64 --frozen-dim 4";

  const auto prep = cli("prepare" + io + " --vocab " + f.vocab.string() + " --split-mode new_sentence --folds 5 --out " +
                        (f.dir / "prep").string());
  REQUIRE(prep.code == 0);
  CHECK(std::filesystem::exists(f.dir / "prep" / "splits.json"));

  REQUIRE(cli("train --steps 0" + io + model + " --vocab " + f.vocab.string() + " --out " + (f.dir / "m0").string())
              .code == 0);
  CHECK(std::filesystem::exists(f.dir / "m0" / "checkpoint.bin"));

  const std::string split = " --splits " + (f.dir / "prep" / "splits.json").string() + " --fold 0";
  REQUIRE(cli("train --steps 3 --batch 2" + io + model + split + " --vocab " + f.vocab.string() + " --out " +
              (f.dir / "m").string())
              .code == 0);
  CHECK(lines(st::read_file(f.dir / "m" / "metrics.csv")).size() == 4);

  const auto gen = cli("generate" + io + split + " --vocab " + f.vocab.string() + " --checkpoint " +
                       (f.dir / "m" / "checkpoint.bin").string() + " --out " + (f.dir / "gen.csv").string());
  REQUIRE(gen.code == 0);
  CHECK(gen.out == "generated=1\n");

  REQUIRE(cli("baseline uniform" + io + " --out " + (f.dir / "u.csv").string()).code == 0);
  REQUIRE(cli("baseline trainlabel" + io + split + " --out " + (f.dir / "tl.csv").string()).code == 0);
  const auto human = cli("baseline human" + io);
  REQUIRE(human.code == 0);
  CHECK(human.out.rfind("human mean_nld=", 0) == 0);

  const auto trace = cli("trace --sentence-id s01 --trace-stride 5 --sentences " + f.sent.string() + " --vocab " +
                         f.vocab.string() + " --checkpoint " + (f.dir / "m" / "checkpoint.bin").string() + " --out " +
                         (f.dir / "trace.csv").string());
  REQUIRE(trace.code == 0);
  // Snapshots after reverse steps 1 and 6 and the final one, 64 x 8 values each.
  CHECK(lines(st::read_file(f.dir / "trace.csv")).size() == 1 + 3 * 64 * 8);
}
