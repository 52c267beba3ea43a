#include "scanpath/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "scanpath/error.hpp"

namespace scanpath {

int levenshtein(std::span<const int> a, std::span<const int> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double nld(std::span<const int> a, std::span<const int> b) {
  const auto longest = std::max(a.size(), b.size());
  if (longest == 0) throw ValidationError("nld of two empty scanpaths is undefined");
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

}  // namespace scanpath
