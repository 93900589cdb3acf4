#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "focus/metrics.hpp"
#include "metric_oracles.hpp"

using namespace focus;
namespace oracle = focus::testing::oracle;

namespace {

std::vector<InvocationId> ids(std::initializer_list<std::uint32_t> values) {
  std::vector<InvocationId> out;
  for (auto v : values) out.push_back({v});
  return out;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("precision keeps N as the denominator") {
    const auto ranked = ids({5, 1, 9});
    const auto gt = ids({1, 2, 9});
    CHECK(match_count(ranked, gt, 1) == 0);
    CHECK(match_count(ranked, gt, 3) == 2);
    CHECK(precision_at(ranked, gt, 2) == 0.5);
    CHECK(precision_at(ranked, gt, 10) == 0.2);
    CHECK(recall_at(ranked, gt, 3) == doctest::Approx(2.0 / 3.0));
    CHECK(recall_at(ranked, ids({}), 3) == 0.0);
    CHECK_THROWS_AS(precision_at(ranked, gt, 0), std::invalid_argument);
  }

  TEST_CASE("success rate is a percentage of projects with a hit") {
    const bool hits[] = {true, false, false, true};
    CHECK(success_rate(hits) == 50.0);
    CHECK(success_rate(3, 4) == 75.0);
    CHECK_THROWS_AS(success_rate(0, 0), std::invalid_argument);
  }

  TEST_CASE("levenshtein on known pairs") {
    auto chars = [](const std::string& s) { return std::vector<char>(s.begin(), s.end()); };
    CHECK(levenshtein(chars("kitten"), chars("sitting")) == 3);
    CHECK(levenshtein(chars(""), chars("abc")) == 3);
    CHECK(levenshtein(chars("flaw"), chars("lawn")) == 2);
    CHECK(levenshtein(chars("same"), chars("same")) == 0);
    const std::vector<std::string> a{"new()", "append()", "toString()"};
    const std::vector<std::string> b{"new()", "toString()"};
    CHECK(levenshtein(a, b) == 1);
  }

  TEST_CASE("levenshtein agrees with the full-table oracle") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> len(0, 25), sym(0, 4);
    for (int t = 0; t < 200; ++t) {
      std::vector<int> a(std::size_t(len(rng))), b(std::size_t(len(rng)));
      for (auto& x : a) x = sym(rng);
      for (auto& x : b) x = sym(rng);
      CHECK(levenshtein(a, b) == oracle::edit_distance(a, b));
    }
  }

  TEST_CASE("fractional ranks share ties") {
    const double v[] = {10, 20, 20, 5};
    const auto r = fractional_ranks(v);
    CHECK(r == std::vector<double>{2, 3.5, 3.5, 1});
  }

  TEST_CASE("correlations match reference values") {
    // Frozen from scipy.stats.spearmanr / kendalltau (tau-b).
    const std::vector<double> x1{1, 2, 2, 3, 5, 4, 7, 7}, y1{2, 1, 3, 3, 6, 4, 8, 5};
    CHECK(*spearman(x1, y1) == doctest::Approx(0.9030468880657605).epsilon(1e-12));
    CHECK(*kendall(x1, y1) == doctest::Approx(0.792593923901217).epsilon(1e-12));
    const std::vector<double> x2{3, 1, 4, 1, 5, 9, 2, 6}, y2{2, 7, 1, 8, 2, 8, 1, 8};
    CHECK(*spearman(x2, y2) == doctest::Approx(0.19885368120992467).epsilon(1e-12));
    CHECK(*kendall(x2, y2) == doctest::Approx(0.16051447078102563).epsilon(1e-12));
  }

  TEST_CASE("perfect and reversed orderings") {
    const std::vector<double> x{1, 2, 3, 4}, y{10, 20, 30, 40}, z{4, 3, 2, 1};
    CHECK(*spearman(x, y) == doctest::Approx(1.0));
    CHECK(*kendall(x, y) == doctest::Approx(1.0));
    CHECK(*spearman(x, z) == doctest::Approx(-1.0));
    CHECK(*kendall(x, z) == doctest::Approx(-1.0));
  }

  TEST_CASE("correlation is absent at zero variance and rejects bad input") {
    const std::vector<double> x{1, 2, 3}, flat{5, 5, 5};
    CHECK_FALSE(spearman(x, flat));
    CHECK_FALSE(kendall(flat, x));
    const std::vector<double> one{1};
    CHECK_THROWS_AS(spearman(one, one), std::invalid_argument);
    CHECK_THROWS_AS(kendall(x, one), std::invalid_argument);
  }

  TEST_CASE("correlations agree with the brute-force oracle") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> len(2, 15), val(0, 5);
    for (int t = 0; t < 200; ++t) {
      const auto n = std::size_t(len(rng));
      std::vector<double> x(n), y(n);
      for (auto& v : x) v = val(rng);
      for (auto& v : y) v = val(rng);
      const auto s = spearman(x, y), so = oracle::spearman(x, y);
      const auto k = kendall(x, y), ko = oracle::kendall_b(x, y);
      REQUIRE(s.has_value() == so.has_value());
      REQUIRE(k.has_value() == ko.has_value());
      if (s) CHECK(std::abs(*s - *so) < 1e-12);
      if (k) CHECK(std::abs(*k - *ko) < 1e-12);
    }
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("definition examples") {
    CHECK(success_rate(2, 3) == doctest::Approx(66.67).epsilon(1e-4));
    const bool none[] = {false, false, false};
    CHECK(success_rate(none) == 0.0);
    CHECK(precision_at(ids({1, 2, 3, 4, 5}), ids({2, 5, 9}), 5) == doctest::Approx(0.4));
    CHECK(recall_at(ids({7, 1, 2, 3}), ids({1, 2, 3}), 4) == 1.0);
  }

  TEST_CASE("small correlation example against pair enumeration") {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 1, 4, 3};
    CHECK(*spearman(x, y) == doctest::Approx(*oracle::spearman(x, y)).epsilon(1e-12));
    CHECK(*kendall(x, y) == doctest::Approx(*oracle::kendall_b(x, y)).epsilon(1e-12));
    CHECK(*spearman(x, y) == doctest::Approx(0.6));
    CHECK(*kendall(x, y) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("levenshtein is symmetric and obeys the triangle inequality") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> len(0, 15), sym(0, 3);
    auto draw = [&] {
      std::vector<int> v(std::size_t(len(rng)));
      for (auto& x : v) x = sym(rng);
      return v;
    };
    for (int t = 0; t < 300; ++t) {
      const auto a = draw(), b = draw(), c = draw();
      CHECK(levenshtein(a, b) == levenshtein(b, a));
      CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
    }
  }

  TEST_CASE("recall and hit count never shrink as N grows") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::uint32_t> item(0, 40);
    for (int t = 0; t < 100; ++t) {
      std::vector<InvocationId> ranked, gt;
      for (int i = 0; i < 30; ++i) ranked.push_back({item(rng)});
      std::set<std::uint32_t> g;
      for (int i = 0; i < 8; ++i) g.insert(item(rng));
      for (auto v : g) gt.push_back({v});
      double recall = 0, hits = 0;
      for (std::size_t n = 1; n <= 30; ++n) {
        CHECK(recall_at(ranked, gt, n) >= recall);
        CHECK(precision_at(ranked, gt, n) * double(n) >= hits - 1e-9);
        recall = recall_at(ranked, gt, n);
        hits = precision_at(ranked, gt, n) * double(n);
      }
    }
  }
}
