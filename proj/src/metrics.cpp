#include "focus/metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace focus {

std::size_t match_count(std::span<const InvocationId> ranked, std::span<const InvocationId> ground_truth,
                        std::size_t n) {
  std::size_t hits = 0;
  const auto top = std::min(n, ranked.size());
  for (std::size_t r = 0; r < top; ++r) {
    if (std::binary_search(ground_truth.begin(), ground_truth.end(), ranked[r])) ++hits;
  }
  return hits;
}

double precision_at(std::span<const InvocationId> ranked, std::span<const InvocationId> ground_truth,
                    std::size_t n) {
  if (n == 0) throw std::invalid_argument("N must be positive");
  return double(match_count(ranked, ground_truth, n)) / double(n);
}

double recall_at(std::span<const InvocationId> ranked, std::span<const InvocationId> ground_truth,
                 std::size_t n) {
  if (n == 0) throw std::invalid_argument("N must be positive");
  if (ground_truth.empty()) return 0.0;
  return double(match_count(ranked, ground_truth, n)) / double(ground_truth.size());
}

double success_rate(std::span<const bool> hits) {
  if (hits.empty()) throw std::invalid_argument("success rate over no projects");
  const auto n = std::count(hits.begin(), hits.end(), true);
  return success_rate(std::size_t(n), hits.size());
}

double success_rate(std::size_t hits, std::size_t projects) {
  if (projects == 0) throw std::invalid_argument("success rate over no projects");
  return 100.0 * double(hits) / double(projects);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

namespace {

void check_pair(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("correlation series differ in length");
  if (xs.size() < 2) throw std::invalid_argument("correlation needs at least two observations");
}

// Pairs tied in both series counted from runs of a (x, y)-sorted order.
std::int64_t tied_pairs(const std::vector<double>& sorted) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const auto run = std::int64_t(j - i + 1);
    total += run * (run - 1) / 2;
    i = j + 1;
  }
  return total;
}

// Merge sort counting inversions (swaps) of `v`.
std::int64_t sort_and_count(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                            std::size_t hi) {
  if (hi - lo < 2) return 0;
  const auto mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_and_count(v, scratch, lo, mid) + sort_and_count(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += std::int64_t(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + std::ptrdiff_t(lo), scratch.begin() + std::ptrdiff_t(hi),
            v.begin() + std::ptrdiff_t(lo));
  return swaps;
}

}  // namespace

std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const auto rx = fractional_ranks(xs);
  const auto ry = fractional_ranks(ys);
  const double n = double(xs.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::optional<double> kendall(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const auto n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (xs[a] != xs[b]) return xs[a] < xs[b];
    return ys[a] < ys[b];
  });

  const auto total = std::int64_t(n) * std::int64_t(n - 1) / 2;
  std::vector<double> sx(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    sx[i] = xs[order[i]];
    y[i] = ys[order[i]];
  }
  const auto ties_x = tied_pairs(sx);
  // Pairs tied in both x and y.
  std::int64_t ties_xy = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && sx[j + 1] == sx[i] && y[j + 1] == y[i]) ++j;
    const auto run = std::int64_t(j - i + 1);
    ties_xy += run * (run - 1) / 2;
    i = j + 1;
  }
  std::vector<double> scratch(n);
  const auto swaps = sort_and_count(y, scratch, 0, n);
  const auto ties_y = tied_pairs(y);

  const double denom = std::sqrt(double(total - ties_x)) * std::sqrt(double(total - ties_y));
  if (total - ties_x == 0 || total - ties_y == 0) return std::nullopt;
  const auto concordant_minus_discordant = total - ties_x - ties_y + ties_xy - 2 * swaps;
  return double(concordant_minus_discordant) / denom;
}

}  // namespace focus
