#include "scanpath/report.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "csv.hpp"
#include "scanpath/error.hpp"
#include "scanpath/metrics.hpp"
#include "scanpath/reading_measures.hpp"

namespace scanpath {

namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::ofstream open_table(const std::filesystem::path& path, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(10);
  out << header << '\n';
  return out;
}

void write_correlation(std::ostream& out, const Correlation& c) {
  if (c.defined)
    out << c.r << ',' << c.p << ',' << c.n << '\n';
  else
    out << "NA,NA," << c.n << '\n';
}

Correlation maybe_pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 3) return Correlation{false, 0.0, 1.0, xs.size()};
  return pearson(xs, ys);
}

}  // namespace

Correlation pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ValidationError("pearson needs paired samples of equal length");
  if (xs.size() < 3) throw ValidationError("pearson needs at least 3 pairs");
  Correlation c;
  c.n = xs.size();
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return c;
  c.defined = true;
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(c.n) - 2.0;
  if (std::abs(c.r) >= 1.0) {
    c.p = 0.0;
  } else {
    const double t = c.r * std::sqrt(df / (1.0 - c.r * c.r));
    boost::math::students_t dist(df);
    c.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return c;
}

std::vector<PairedNld> paired_nld(const Corpus& truth, const Corpus& predicted) {
  std::map<std::string, const ScanpathRecord*> first_for_sentence;
  std::map<std::pair<std::string, std::string>, const ScanpathRecord*> by_reader;
  for (const auto& rec : predicted.scanpaths) {
    first_for_sentence.try_emplace(rec.sentence_id, &rec);
    by_reader.try_emplace({rec.reader_id, rec.sentence_id}, &rec);
  }
  std::vector<PairedNld> out;
  for (const auto& rec : truth.scanpaths) {
    const ScanpathRecord* pred = nullptr;
    if (auto it = by_reader.find({rec.reader_id, rec.sentence_id}); it != by_reader.end())
      pred = it->second;
    else if (auto jt = first_for_sentence.find(rec.sentence_id); jt != first_for_sentence.end())
      pred = jt->second;
    if (pred == nullptr) throw ValidationError("no prediction for sentence '" + rec.sentence_id + "'");
    out.push_back({rec.reader_id, rec.sentence_id, nld(rec.fixations, pred->fixations)});
  }
  return out;
}

ReportSummary write_report(const Corpus& truth, const std::vector<Generator>& generators,
                           const std::filesystem::path& out_dir, const std::optional<PredictorTable>& predictors) {
  std::filesystem::create_directories(out_dir);
  constexpr std::size_t kMeasures = ReadingMeasures::kNames.size();

  std::vector<ReadingMeasures> true_measures;
  for (const auto& rec : truth.scanpaths) true_measures.push_back(reading_measures(rec.fixations, truth.word_count(rec.sentence_id)));

  std::vector<std::vector<PairedNld>> nlds;
  ReportSummary summary;
  for (const auto& g : generators) {
    nlds.push_back(paired_nld(truth, g.corpus));
    std::vector<double> v;
    for (const auto& p : nlds.back()) v.push_back(p.nld);
    summary.mean_nld.emplace_back(g.name, mean(v));
    summary.nld_standard_error.emplace_back(g.name, v.size() > 1 ? sample_sd(v) / std::sqrt(double(v.size())) : 0.0);
  }

  {
    auto out = open_table(out_dir / "nld_per_scanpath.csv", "generator,reader_id,sentence_id,nld");
    for (std::size_t g = 0; g < generators.size(); ++g)
      for (const auto& p : nlds[g])
        out << csv::quote(generators[g].name) << ',' << csv::quote(p.reader_id) << ',' << csv::quote(p.sentence_id) << ','
            << p.nld << '\n';
  }

  {
    auto out = open_table(out_dir / "measures_summary.csv", "source,measure,mean,sd");
    auto emit = [&](const std::string& source, const std::vector<ReadingMeasures>& ms) {
      for (std::size_t k = 0; k < kMeasures; ++k) {
        std::vector<double> v;
        for (const auto& m : ms) v.push_back(m.values()[k]);
        out << csv::quote(source) << ',' << ReadingMeasures::kNames[k] << ',' << mean(v) << ',' << sample_sd(v) << '\n';
      }
    };
    emit("true", true_measures);
    for (const auto& g : generators) {
      std::vector<ReadingMeasures> ms;
      for (const auto& rec : g.corpus.scanpaths)
        ms.push_back(reading_measures(rec.fixations, g.corpus.word_count(rec.sentence_id)));
      emit(g.name, ms);
    }
  }

  {
    // Per reader: mean of each true measure against the reader's mean NLD.
    auto out = open_table(out_dir / "reader_correlations.csv", "generator,measure,r,p,n");
    for (std::size_t g = 0; g < generators.size(); ++g) {
      std::map<std::string, std::vector<std::size_t>> rows;
      for (std::size_t i = 0; i < truth.scanpaths.size(); ++i) rows[truth.scanpaths[i].reader_id].push_back(i);
      for (std::size_t k = 0; k < kMeasures; ++k) {
        std::vector<double> xs, ys;
        for (const auto& [reader, idx] : rows) {
          double mx = 0.0, my = 0.0;
          for (auto i : idx) {
            mx += true_measures[i].values()[k];
            my += nlds[g][i].nld;
          }
          xs.push_back(mx / double(idx.size()));
          ys.push_back(my / double(idx.size()));
        }
        out << csv::quote(generators[g].name) << ',' << ReadingMeasures::kNames[k] << ',';
        write_correlation(out, maybe_pearson(xs, ys));
      }
    }
  }

  {
    auto out = open_table(out_dir / "nld_measure_correlations.csv", "generator,measure,r,p,n");
    for (std::size_t g = 0; g < generators.size(); ++g) {
      std::vector<double> ys;
      for (const auto& p : nlds[g]) ys.push_back(p.nld);
      for (std::size_t k = 0; k < kMeasures; ++k) {
        std::vector<double> xs;
        for (const auto& m : true_measures) xs.push_back(m.values()[k]);
        out << csv::quote(generators[g].name) << ',' << ReadingMeasures::kNames[k] << ',';
        write_correlation(out, maybe_pearson(xs, ys));
      }
    }
  }

  {
    // Mean NLD per sentence, correlated between every pair of generators.
    std::vector<std::map<std::string, std::pair<double, int>>> per_sentence(generators.size());
    for (std::size_t g = 0; g < generators.size(); ++g)
      for (const auto& p : nlds[g]) {
        auto& [sum, n] = per_sentence[g][p.sentence_id];
        sum += p.nld;
        ++n;
      }
    auto out = open_table(out_dir / "sentence_nld_correlations.csv", "generator_a,generator_b,r,p,n");
    for (std::size_t a = 0; a < generators.size(); ++a)
      for (std::size_t b = a + 1; b < generators.size(); ++b) {
        std::vector<double> xs, ys;
        for (const auto& [id, sa] : per_sentence[a]) {
          xs.push_back(sa.first / sa.second);
          const auto& sb = per_sentence[b].at(id);
          ys.push_back(sb.first / sb.second);
        }
        out << csv::quote(generators[a].name) << ',' << csv::quote(generators[b].name) << ',';
        write_correlation(out, maybe_pearson(xs, ys));
      }
  }

  {
    auto out = open_table(out_dir / "word_measures.csv",
                          "source,reader_id,sentence_id,word_index,ffc,tfc,fpr,sr,word_length,frequency,surprisal");
    auto emit = [&](const std::string& source, const Corpus& corpus) {
      for (const auto& rec : corpus.scanpaths) {
        const auto m = reading_measures(rec.fixations, corpus.word_count(rec.sentence_id));
        for (std::size_t w = 0; w < m.tfc.size(); ++w) {
          out << csv::quote(source) << ',' << csv::quote(rec.reader_id) << ',' << csv::quote(rec.sentence_id) << ','
              << (w + 1) << ',' << m.ffc[w] << ',' << m.tfc[w] << ',' << m.fpr[w] << ',' << m.sr[w];
          const WordPredictors* wp = nullptr;
          if (predictors) {
            auto it = predictors->find({rec.sentence_id, static_cast<int>(w + 1)});
            if (it != predictors->end()) wp = &it->second;
          }
          if (wp)
            out << ',' << wp->word_length << ',' << wp->frequency << ',' << wp->surprisal << '\n';
          else
            out << ",NA,NA,NA\n";
        }
      }
    };
    emit("true", truth);
    for (const auto& g : generators) emit(g.name, g.corpus);
  }

  return summary;
}

}  // namespace scanpath
