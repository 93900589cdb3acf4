#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "focus/corpus.hpp"

namespace focus {

// |GT ∩ top-N of `ranked`|. `ground_truth` must be sorted and unique.
std::size_t match_count(std::span<const InvocationId> ranked, std::span<const InvocationId> ground_truth,
                        std::size_t n);

// |match_N| / N; N stays the denominator when fewer than N items exist.
double precision_at(std::span<const InvocationId> ranked, std::span<const InvocationId> ground_truth,
                    std::size_t n);

// |match_N| / |GT|, 0 for an empty ground truth.
double recall_at(std::span<const InvocationId> ranked, std::span<const InvocationId> ground_truth,
                 std::size_t n);

// Percentage of rows with at least one hit. Throws on empty input.
double success_rate(std::span<const bool> hits);
double success_rate(std::size_t hits, std::size_t projects);

// Unit-cost edit distance over arbitrary symbol sequences, two-row DP.
template <typename Symbol>
std::size_t levenshtein(std::span<const Symbol> a, std::span<const Symbol> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

template <typename Symbol>
std::size_t levenshtein(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  return levenshtein(std::span<const Symbol>(a), std::span<const Symbol>(b));
}

// Fractional (mid) ranks starting at 1; ties share the mean rank.
std::vector<double> fractional_ranks(std::span<const double> values);

// Pearson correlation of fractional ranks. Absent when either series has
// zero variance. Throws std::invalid_argument on size mismatch or n < 2.
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

// Kendall tau-b with tie correction, O(n log n). Same absence rule.
std::optional<double> kendall(std::span<const double> xs, std::span<const double> ys);

}  // namespace focus
