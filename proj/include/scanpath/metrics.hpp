#pragma once

#include <span>

namespace scanpath {

/// Unit-cost edit distance between two word-index sequences.
int levenshtein(std::span<const int> a, std::span<const int> b);

/// levenshtein(a, b) / max(|a|, |b|). Throws ValidationError when both are empty.
double nld(std::span<const int> a, std::span<const int> b);

}  // namespace scanpath
