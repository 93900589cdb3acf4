#include <doctest.h>

#include <sstream>

#include "focus/report.hpp"
#include "synthetic.hpp"

using namespace focus;

namespace {

EvalReport small_report(bool timings) {
  testing::SyntheticOptions o;
  o.projects = 20;
  static const auto corpus = testing::generate_corpus(o);
  EvalConfig config;
  config.configuration = Configuration::C11;
  config.n_values = {1, 5};
  config.seed = 2;
  config.timings = timings;
  return run_evaluation(corpus, config);
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("json report layout") {
    const auto j = to_json(small_report(false));
    CHECK(j["format"] == "focus-eval-report");
    CHECK(j["version"] == 1);
    CHECK(j["config"]["configuration"] == "C1.1");
    CHECK(j["config"]["folds"] == "ten-fold");
    CHECK(j["environment"]["projects"] == 20);
    CHECK(j["rows"].is_array());
    CHECK(j["aggregates"].size() == 2);
    for (const auto& row : j["rows"]) CHECK_FALSE(row.contains("elapsed_seconds"));
  }

  TEST_CASE("timings are opt-in") {
    const auto j = to_json(small_report(true));
    for (const auto& row : j["rows"]) CHECK(row.contains("elapsed_seconds"));
    for (const auto& agg : j["aggregates"]) CHECK(agg.contains("mean_elapsed_seconds"));
  }

  TEST_CASE("rows survive a json round trip and reproduce the aggregates") {
    const auto report = small_report(false);
    const auto j = nlohmann::json::parse(to_json(report).dump());
    const auto rows = rows_from_json(j);
    REQUIRE(rows.size() == report.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].project == report.rows[i].project);
      CHECK(rows[i].precision == report.rows[i].precision);
      CHECK(rows[i].levenshtein == report.rows[i].levenshtein);
    }
    const auto again = aggregate_rows(rows);
    REQUIRE(again.size() == report.aggregates.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
      CHECK(again[i].success_rate == report.aggregates[i].success_rate);
      CHECK(again[i].mean_precision == report.aggregates[i].mean_precision);
      CHECK(again[i].mean_recall == report.aggregates[i].mean_recall);
    }
  }

  TEST_CASE("csv has a header and one line per row") {
    const auto report = small_report(false);
    std::ostringstream out;
    write_csv(out, report);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "project,category,configuration,k,N,hit,precision,recall,gt_size,levenshtein,fallback_used");
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == report.rows.size());
  }
}
