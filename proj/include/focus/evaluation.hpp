#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "focus/corpus.hpp"
#include "focus/engine.hpp"

namespace focus {

// Context/query split of a testing project.
//   C1.x: about the first half of the declarations, active = last of that half
//   C2.x: every declaration but the last as context, active = last
//   Cx.1: one query invocation; Cx.2: four
enum class Configuration { C11, C12, C21, C22 };

std::string_view to_string(Configuration c);
std::optional<Configuration> parse_configuration(std::string_view text);  // "c11", "C1.1", ...
std::size_t query_length(Configuration c);                                 // π

enum class FoldScheme { TenFold, LeaveOneOut };

std::string_view to_string(FoldScheme f);

struct EvalConfig {
  Configuration configuration = Configuration::C12;
  std::vector<std::size_t> k_values{4};
  std::size_t M = 25;
  std::vector<std::size_t> n_values{1, 5, 10, 15, 20};
  FoldScheme folds = FoldScheme::TenFold;
  std::uint64_t seed = 0;
  std::size_t query_size = 5;  // recommendations added to the snippet query
  std::size_t jobs = 1;
  bool similarity_weighted = false;
  bool timings = false;  // per-row elapsed time; makes the report run-dependent
};

struct EvalSplit {
  std::vector<Declaration> context;   // kept declarations before the active one
  Declaration active_query;           // active declaration cut to its first π calls
  Declaration active_full;            // the untouched active declaration
  std::vector<InvocationId> ground_truth;  // sorted set, query items removed
  std::vector<Declaration> removed;

  ActiveProject active_project(const std::string& id) const;
};

struct SkipReason {
  std::string reason;
};

// Splits per the configuration, or a skip reason when the project cannot be
// evaluated (too few declarations, active declaration too short, or nothing
// left to predict).
std::variant<EvalSplit, SkipReason> split_project(const Project& project, Configuration configuration);

struct Fold {
  std::vector<std::size_t> train;  // corpus indices, ascending
  std::vector<std::size_t> test;
};

// Seeded shuffle, then either ten folds of near-equal project count balanced
// by declaration count, or one fold per project.
std::vector<Fold> make_folds(const Corpus& corpus, FoldScheme scheme, std::uint64_t seed);

struct EvalRow {
  std::string project;
  std::string category;
  Configuration configuration = Configuration::C11;
  std::size_t k = 0;
  std::size_t n = 0;
  bool hit = false;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t ground_truth_size = 0;
  std::optional<std::size_t> levenshtein;
  bool fallback_used = false;
  std::optional<double> elapsed_seconds;
};

struct Aggregate {
  Configuration configuration = Configuration::C11;
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t projects = 0;
  double success_rate = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  std::optional<double> mean_levenshtein;
  std::optional<double> mean_elapsed_seconds;
};

struct CategoryPrecision {
  std::string category;
  std::size_t cardinality = 0;  // projects in the corpus
  std::size_t evaluated = 0;
  double mean_precision = 0.0;
};

struct CategoryCorrelation {
  std::size_t k = 0;
  std::size_t n = 0;
  std::vector<CategoryPrecision> categories;
  std::optional<double> spearman;
  std::optional<double> kendall;
};

struct SkippedProject {
  std::string project;
  std::string reason;
};

struct EvalReport {
  EvalConfig config;
  std::size_t corpus_projects = 0;
  std::size_t corpus_declarations = 0;
  std::size_t corpus_vocabulary = 0;
  std::size_t fold_count = 0;
  std::vector<EvalRow> rows;  // sorted by (project, k, n)
  std::vector<SkippedProject> skipped;
  std::vector<Aggregate> aggregates;
  std::vector<CategoryCorrelation> categories;
};

inline constexpr std::string_view kUncategorized = "uncategorized";

class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::map<std::string, std::size_t> histogram)
      : std::runtime_error(what), histogram_(std::move(histogram)) {}
  const std::map<std::string, std::size_t>& skip_histogram() const noexcept { return histogram_; }

 private:
  std::map<std::string, std::size_t> histogram_;
};

// Runs every fold; throws EvaluationError when all projects were skipped.
EvalReport run_evaluation(const Corpus& corpus, const EvalConfig& config);

// Aggregates and category correlations derived from the rows alone.
std::vector<Aggregate> aggregate_rows(const std::vector<EvalRow>& rows);
std::vector<CategoryCorrelation> correlate_categories(const Corpus& corpus, const std::vector<EvalRow>& rows);

}  // namespace focus
