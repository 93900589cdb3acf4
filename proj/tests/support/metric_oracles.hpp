#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

// Deliberately naive versions of the metrics: full DP tables, O(n^2) pair
// counting, rank-by-counting. Oracles for the library implementations.
namespace focus::testing::oracle {

template <typename T>
std::size_t edit_distance(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    }
  }
  return d[a.size()][b.size()];
}

inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : v) {
      if (x < v[i]) less += 1;
      if (x == v[i]) equal += 1;
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

inline std::optional<double> kendall_b(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        tie_x += 1;
      } else if (dy == 0) {
        tie_y += 1;
      } else if ((dx > 0) == (dy > 0)) {
        concordant += 1;
      } else {
        discordant += 1;
      }
    }
  }
  const double nx = concordant + discordant + tie_y;  // pairs not tied in x
  const double ny = concordant + discordant + tie_x;
  if (nx == 0 || ny == 0) return std::nullopt;
  return (concordant - discordant) / std::sqrt(nx * ny);
}

// Precision, recall and hit for a ranked list cut at n.
struct Retrieval {
  double precision = 0;
  double recall = 0;
  bool hit = false;
};

template <typename T>
Retrieval retrieval(const std::vector<T>& ranked, const std::vector<T>& ground_truth, std::size_t n) {
  const std::set<T> gt(ground_truth.begin(), ground_truth.end());
  double matches = 0;
  for (std::size_t i = 0; i < ranked.size() && i < n; ++i) matches += gt.count(ranked[i]) ? 1 : 0;
  Retrieval r;
  r.precision = matches / double(n);
  r.recall = gt.empty() ? 0.0 : matches / double(gt.size());
  r.hit = matches > 0;
  return r;
}

}  // namespace focus::testing::oracle
