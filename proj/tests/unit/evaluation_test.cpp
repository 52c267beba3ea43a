#include "doctest.h"

#include <cmath>
#include <map>

#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"
#include "scanpath/baselines.hpp"
#include "scanpath/error.hpp"
#include "scanpath/metrics.hpp"
#include "scanpath/reading_measures.hpp"
#include "scanpath/report.hpp"
#include "scanpath/rng.hpp"

using namespace scanpath;
namespace st = scanpath::testing;
using V = std::vector<int>;

TEST_CASE("edit distance examples") {
  CHECK(levenshtein(V{1, 2, 3}, V{1, 2, 3}) == 0);
  CHECK(levenshtein(V{1, 2, 3, 2}, V{1, 2, 3}) == st::levenshtein_oracle({1, 2, 3, 2}, {1, 2, 3}));
  CHECK(levenshtein(V{1, 2, 3, 2}, V{1, 2, 3}) == 1);
  CHECK(levenshtein(V{}, V{1, 2}) == 2);
}

TEST_CASE("normalized edit distance") {
  CHECK(nld(V{4, 5}, V{4, 5}) == 0.0);
  CHECK(nld(V{1, 2, 3}, V{4, 5, 6}) == 1.0);
  CHECK(nld(V{1, 2, 3, 2}, V{1, 2, 3}) == 0.25);
  CHECK_THROWS_AS(nld(V{}, V{}), ValidationError);
  Rng rng(1);
  for (int n = 0; n < 200; ++n) {
    V a(1 + rng.below(8)), b(rng.below(8));
    for (int& x : a) x = static_cast<int>(rng.below(4));
    for (int& x : b) x = static_cast<int>(rng.below(4));
    CHECK(levenshtein(a, b) == st::levenshtein_oracle(a, b));
    CHECK(nld(a, b) == nld(b, a));
  }
}

TEST_CASE("uniform baseline") {
  EmpiricalDistribution dist;
  dist.lengths = {3, 5, 7};
  dist.saccades = {1};
  Rng rng(2);
  for (int f : uniform_baseline(1, dist, rng)) CHECK(f == 1);
  Rng a(3), b(3);
  CHECK(uniform_baseline(6, dist, a) == uniform_baseline(6, dist, b));

  dist.lengths = {1};
  std::map<int, int> counts;
  for (int n = 0; n < 10000; ++n) ++counts[uniform_baseline(4, dist, rng)[0]];
  for (int w = 1; w <= 4; ++w) CHECK(std::abs(counts[w] / 10000.0 - 0.25) <= 0.02);
}

TEST_CASE("train-label baseline") {
  EmpiricalDistribution dist;
  dist.lengths = {3};
  dist.saccades = {1};
  Rng rng(4);
  CHECK(trainlabel_baseline(5, dist, rng) == V{1, 2, 3});

  dist.saccades = {5};
  dist.lengths = {4};
  CHECK(trainlabel_baseline(3, dist, rng) == V{1, 3, 3, 3});

  // Realized saccades follow the source distribution away from the edges.
  dist.saccades = {1, 1, 1, 2, 2, -1, 3, -2};
  dist.lengths = {40};
  std::map<int, double> source, seen;
  for (int s : dist.saccades) source[s] += 1.0 / static_cast<double>(dist.saccades.size());
  double total = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const auto path = trainlabel_baseline(100000, dist, rng);
    for (std::size_t i = 1; i < path.size(); ++i) {
      if (path[i - 1] <= 2) continue;  // a negative step could clamp here
      seen[path[i] - path[i - 1]] += 1.0;
      total += 1.0;
    }
  }
  double tv = 0.0;
  for (auto& [k, v] : seen) tv += std::abs(v / total - source[k]);
  for (auto& [k, v] : source)
    if (!seen.contains(k)) tv += v;
  CHECK(tv / 2.0 <= 0.05);
}

TEST_CASE("human baseline") {
  Corpus c;
  c.sentences["s"] = {"a", "b", "c"};
  c.scanpaths = {{"r1", "s", {1, 2}}, {"r2", "s", {1, 2}}};
  CHECK(human_baseline(c).mean == 0.0);
  c.scanpaths = {{"r1", "s", {1, 2}}, {"r2", "s", {1, 3}}};
  CHECK(human_baseline(c).mean == 0.5);
  c.scanpaths = {{"r1", "s", {1, 2}}};
  CHECK_THROWS_AS(human_baseline(c), ValidationError);
}

TEST_CASE("reading measures on hand traces") {
  SUBCASE("monotone") {
    const auto m = reading_measures(V{1, 2, 3}, 3);
    CHECK(m.regression_rate == 0.0);
    CHECK(m.normalized_fixation_count == 1.0);
    CHECK(m.progressive_saccade_len == 1.0);
    CHECK(m.regressive_saccade_len == 0.0);
    CHECK(m.skipping_rate == 0.0);
    CHECK(m.ffc == V{1, 1, 1});
    CHECK(m.tfc == V{1, 1, 1});
  }
  SUBCASE("single regression") {
    // Saccades +2, -1, +2; word 2 is passed by the frontier, then revisited.
    const auto m = reading_measures(V{1, 3, 2, 4}, 4);
    CHECK(m.regression_rate == 0.25);
    CHECK(m.sr == V{0, 1, 0, 0});
    CHECK(m.fpr == V{0, 0, 1, 0});
    CHECK(m.ffc == V{1, 0, 1, 1});
    CHECK(m.tfc == V{1, 1, 1, 1});
    CHECK(m.progressive_saccade_len == 2.0);
    CHECK(m.regressive_saccade_len == 1.0);
    CHECK(m.skipping_rate == 0.25);
    CHECK(m.first_pass_count == 0.75);
  }
  SUBCASE("refixation") {
    const auto m = reading_measures(V{2, 2, 3}, 3);
    CHECK(m.ffc[1] == 2);
    CHECK(m.tfc[1] == 2);
    CHECK(m.sr[0] == 1);
  }
  SUBCASE("regressions from one word count once") {
    const auto m = reading_measures(V{1, 2, 3, 1, 3, 2}, 4);
    CHECK(m.regression_rate == 0.25);
  }
  CHECK_THROWS_AS(reading_measures(V{5}, 3), ValidationError);
}

TEST_CASE("pearson correlation") {
  using D = std::vector<double>;
  CHECK(pearson(D{1, 2, 3}, D{2, 4, 6}).r == doctest::Approx(1.0));
  CHECK(pearson(D{1, 2, 3}, D{3, 2, 1}).r == doctest::Approx(-1.0));
  // r = 3 / sqrt(5 * 5) = 0.6; with 2 degrees of freedom the two-sided
  // p-value is 1 - t / sqrt(2 + t^2) = 1 - r = 0.4.
  const auto c = pearson(D{1, 2, 3, 4}, D{2, 1, 4, 3});
  CHECK(std::abs(c.r - 0.6) < 1e-12);
  CHECK(std::abs(c.p - 0.4) < 1e-12);
  CHECK_FALSE(pearson(D{1, 1, 1}, D{1, 2, 3}).defined);
  CHECK_THROWS_AS(pearson(D{1, 2}, D{1, 2}), ValidationError);
  CHECK_THROWS_AS(pearson(D{1, 2, 3}, D{1, 2}), ValidationError);
}

TEST_CASE("report tables") {
  const auto set = st::rule_corpus(8, 3, 16);
  const auto dist = EmpiricalDistribution::from(set.corpus);
  std::vector<Generator> gens{{"self", set.corpus},
                              {"uniform", baseline_corpus(BaselineKind::Uniform, dist, set.corpus.sentences, 1)}};
  const auto dir = st::fresh_dir("report");
  PredictorTable predictors;
  predictors[{"s00", 1}] = {3, 0.5, 7.25};
  const auto summary = write_report(set.corpus, gens, dir, predictors);
  CHECK(summary.mean_nld[0].second == 0.0);
  CHECK(summary.mean_nld[1].second > 0.0);
  for (const char* f : {"nld_per_scanpath.csv", "measures_summary.csv", "reader_correlations.csv",
                        "nld_measure_correlations.csv", "sentence_nld_correlations.csv", "word_measures.csv"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(st::read_file(dir / "word_measures.csv").find("3,0.5,7.25") != std::string::npos);
}
