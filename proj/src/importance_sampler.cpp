#include "scanpath/importance_sampler.hpp"

#include <cmath>
#include <numeric>

#include "scanpath/error.hpp"
#include "scanpath/rng.hpp"

namespace scanpath {

ImportanceSampler::ImportanceSampler(int t_max)
    : squared_(static_cast<std::size_t>(t_max) + 1), counts_(static_cast<std::size_t>(t_max) + 1, 0) {
  if (t_max < 0) throw ConfigError("sampler needs a non-negative step count");
}

bool ImportanceSampler::warmed_up() const {
  for (int c : counts_)
    if (c < kHistory) return false;
  return true;
}

std::vector<double> ImportanceSampler::probabilities() const {
  const std::size_t n = counts_.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  if (!warmed_up()) return p;
  for (std::size_t t = 0; t < n; ++t) {
    const double mean_sq = std::accumulate(squared_[t].begin(), squared_[t].end(), 0.0) / kHistory;
    p[t] = std::sqrt(mean_sq);
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  for (auto& v : p) v = v / total * (1.0 - kUniformFloor) + kUniformFloor / static_cast<double>(n);
  const double renorm = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= renorm;
  return p;
}

int ImportanceSampler::sample(Rng& rng) const {
  if (!warmed_up()) return static_cast<int>(rng.below(counts_.size()));
  const auto p = probabilities();
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    acc += p[t];
    if (u < acc) return static_cast<int>(t);
  }
  return static_cast<int>(p.size()) - 1;
}

double ImportanceSampler::weight(int t) const {
  const auto p = probabilities();
  return 1.0 / (static_cast<double>(p.size()) * p.at(static_cast<std::size_t>(t)));
}

void ImportanceSampler::update(int t, double loss) {
  const auto idx = static_cast<std::size_t>(t);
  auto& ring = squared_.at(idx);
  ring[static_cast<std::size_t>(counts_[idx] % kHistory)] = loss * loss;
  ++counts_[idx];
}

}  // namespace scanpath
