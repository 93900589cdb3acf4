#include "focus/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <random>
#include <set>
#include <thread>
#include <tuple>

#include "focus/metrics.hpp"

namespace focus {

std::string_view to_string(Configuration c) {
  switch (c) {
    case Configuration::C11: return "C1.1";
    case Configuration::C12: return "C1.2";
    case Configuration::C21: return "C2.1";
    case Configuration::C22: return "C2.2";
  }
  return "?";
}

std::optional<Configuration> parse_configuration(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c != '.') key.push_back(char(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "c11") return Configuration::C11;
  if (key == "c12") return Configuration::C12;
  if (key == "c21") return Configuration::C21;
  if (key == "c22") return Configuration::C22;
  return std::nullopt;
}

std::size_t query_length(Configuration c) {
  return (c == Configuration::C11 || c == Configuration::C21) ? 1 : 4;
}

std::string_view to_string(FoldScheme f) {
  return f == FoldScheme::TenFold ? "ten-fold" : "leave-one-out";
}

ActiveProject EvalSplit::active_project(const std::string& id) const {
  ActiveProject project{id, context, context.size()};
  project.declarations.push_back(active_query);
  return project;
}

std::variant<EvalSplit, SkipReason> split_project(const Project& project, Configuration configuration) {
  const auto total = project.declarations.size();
  const bool first_half = configuration == Configuration::C11 || configuration == Configuration::C12;
  const auto pi = query_length(configuration);

  std::size_t active_index = 0;
  if (first_half) {
    if (total < 4) return SkipReason{"too-few-declarations"};
    active_index = total / 2 - 1;
  } else {
    if (total < 2) return SkipReason{"too-few-declarations"};
    active_index = total - 1;
  }
  const auto& active = project.declarations[active_index];
  if (active.invocations.size() <= pi) return SkipReason{"active-declaration-too-short"};

  EvalSplit split;
  split.context.assign(project.declarations.begin(), project.declarations.begin() + std::ptrdiff_t(active_index));
  split.removed.assign(project.declarations.begin() + std::ptrdiff_t(active_index) + 1, project.declarations.end());
  split.active_full = active;
  split.active_query = Declaration{active.name, active.param_types,
                                   {active.invocations.begin(), active.invocations.begin() + std::ptrdiff_t(pi)},
                                   std::nullopt};
  std::set<InvocationId> query(split.active_query.invocations.begin(), split.active_query.invocations.end());
  std::set<InvocationId> rest(active.invocations.begin() + std::ptrdiff_t(pi), active.invocations.end());
  for (auto id : rest) {
    if (!query.contains(id)) split.ground_truth.push_back(id);
  }
  if (split.ground_truth.empty()) return SkipReason{"empty-ground-truth"};
  return split;
}

namespace {

// Uniform in [0, bound) by rejection; independent of the standard library's
// distribution implementations so fold assignment is portable.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

std::vector<std::size_t> complement(std::size_t total, const std::vector<std::size_t>& sorted_test) {
  std::vector<std::size_t> train;
  train.reserve(total - sorted_test.size());
  for (std::size_t i = 0; i < total; ++i) {
    if (!std::binary_search(sorted_test.begin(), sorted_test.end(), i)) train.push_back(i);
  }
  return train;
}

}  // namespace

std::vector<Fold> make_folds(const Corpus& corpus, FoldScheme scheme, std::uint64_t seed) {
  const auto total = corpus.projects().size();
  const std::size_t fold_count = scheme == FoldScheme::TenFold ? 10 : total;
  if (total < 2 || total < fold_count) {
    throw std::invalid_argument("corpus has " + std::to_string(total) + " projects, too few for " +
                                std::string(to_string(scheme)) + " cross-validation");
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = total - 1; i > 0; --i) std::swap(order[i], order[bounded(rng, i + 1)]);

  std::vector<std::vector<std::size_t>> tests(fold_count);
  if (scheme == FoldScheme::LeaveOneOut) {
    for (std::size_t f = 0; f < total; ++f) tests[f] = {order[f]};
  } else {
    // Largest projects first, each into the lightest fold with room left.
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return corpus.project(a).declarations.size() > corpus.project(b).declarations.size();
    });
    std::vector<std::size_t> load(fold_count, 0);
    std::vector<std::size_t> capacity(fold_count, total / fold_count);
    for (std::size_t f = 0; f < total % fold_count; ++f) ++capacity[f];
    for (auto p : order) {
      std::size_t best = fold_count;
      for (std::size_t f = 0; f < fold_count; ++f) {
        if (tests[f].size() == capacity[f]) continue;
        if (best == fold_count || load[f] < load[best]) best = f;
      }
      tests[best].push_back(p);
      load[best] += corpus.project(p).declarations.size();
    }
  }
  std::vector<Fold> folds;
  folds.reserve(fold_count);
  for (auto& test : tests) {
    std::sort(test.begin(), test.end());
    folds.push_back(Fold{complement(total, test), std::move(test)});
  }
  return folds;
}

namespace {

std::string category_of(const Project& p) { return p.category.value_or(std::string(kUncategorized)); }

struct Task {
  std::size_t k;
  std::size_t fold;
  std::size_t project;
};

std::vector<EvalRow> evaluate_one(const Corpus& corpus, const Background& background, const RatingTensor& tensor,
                                  const EvalConfig& config, const Task& task, const EvalSplit& split) {
  const auto& project = corpus.project(task.project);
  EngineOptions options;
  options.k = task.k;
  options.M = config.M;
  options.N = *std::max_element(config.n_values.begin(), config.n_values.end());
  options.similarity_weighted = config.similarity_weighted;

  const auto active = split.active_project(project.id);
  const auto recs = recommend_apis(background, tensor, active, options);
  std::vector<InvocationId> ranked;
  ranked.reserve(recs.items.size());
  for (const auto& item : recs.items) ranked.push_back(item.invocation);

  std::optional<std::size_t> distance;
  const auto snippets = recommend_snippets(corpus, recs, split.active_query, recs.projects, config.query_size, 1);
  if (!snippets.empty()) {
    std::vector<std::string> truth;
    for (auto id : split.active_full.invocations) truth.push_back(corpus.vocabulary().canonical(id));
    distance = levenshtein(snippets.front().invocation_sequence, truth);
  }

  std::vector<EvalRow> rows;
  for (auto n : config.n_values) {
    EvalRow row;
    row.project = project.id;
    row.category = category_of(project);
    row.configuration = config.configuration;
    row.k = task.k;
    row.n = n;
    const auto matches = match_count(ranked, split.ground_truth, n);
    row.hit = matches > 0;
    row.precision = precision_at(ranked, split.ground_truth, n);
    row.recall = recall_at(ranked, split.ground_truth, n);
    row.ground_truth_size = split.ground_truth.size();
    row.levenshtein = distance;
    row.fallback_used = recs.fallback_used;
    if (config.timings) row.elapsed_seconds = recs.elapsed_seconds;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

EvalReport run_evaluation(const Corpus& corpus, const EvalConfig& config) {
  if (config.k_values.empty() || config.n_values.empty()) {
    throw std::invalid_argument("k and N lists must be non-empty");
  }
  for (auto v : config.k_values) {
    if (v == 0) throw std::invalid_argument("k must be positive");
  }
  for (auto v : config.n_values) {
    if (v == 0) throw std::invalid_argument("N must be positive");
  }
  if (config.M == 0 || config.query_size == 0) throw std::invalid_argument("M and query size must be positive");

  const auto folds = make_folds(corpus, config.folds, config.seed);
  const RatingTensor tensor(corpus);

  EvalReport report;
  report.config = config;
  report.corpus_projects = corpus.projects().size();
  report.corpus_declarations = corpus.declaration_total();
  report.corpus_vocabulary = corpus.vocabulary().size();
  report.fold_count = folds.size();

  std::vector<std::optional<EvalSplit>> splits(corpus.projects().size());
  std::map<std::string, std::size_t> histogram;
  for (std::size_t p = 0; p < corpus.projects().size(); ++p) {
    auto result = split_project(corpus.project(p), config.configuration);
    if (auto* skip = std::get_if<SkipReason>(&result)) {
      report.skipped.push_back({corpus.project(p).id, skip->reason});
      ++histogram[skip->reason];
    } else {
      splits[p] = std::move(std::get<EvalSplit>(result));
    }
  }
  std::sort(report.skipped.begin(), report.skipped.end(),
            [](const auto& a, const auto& b) { return a.project < b.project; });

  std::vector<Task> tasks;
  for (auto k : config.k_values) {
    for (std::size_t f = 0; f < folds.size(); ++f) {
      for (auto p : folds[f].test) {
        if (splits[p]) tasks.push_back({k, f, p});
      }
    }
  }
  if (tasks.empty()) {
    std::string message = "every project was skipped:";
    for (const auto& [reason, count] : histogram) message += " " + reason + "=" + std::to_string(count);
    throw EvaluationError(message, histogram);
  }

  std::vector<std::optional<Background>> backgrounds(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const bool used = std::any_of(tasks.begin(), tasks.end(), [&](const Task& t) { return t.fold == f; });
    if (used) backgrounds[f].emplace(corpus, folds[f].train);
  }

  std::vector<std::vector<EvalRow>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
      const auto& task = tasks[t];
      results[t] = evaluate_one(corpus, *backgrounds[task.fold], tensor, config, task, *splits[task.project]);
    }
  };
  const auto workers = std::max<std::size_t>(1, std::min(config.jobs, tasks.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (auto& rows : results) {
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const EvalRow& a, const EvalRow& b) {
    return std::tie(a.project, a.k, a.n) < std::tie(b.project, b.k, b.n);
  });
  report.aggregates = aggregate_rows(report.rows);
  report.categories = correlate_categories(corpus, report.rows);
  return report;
}

std::vector<Aggregate> aggregate_rows(const std::vector<EvalRow>& rows) {
  struct Accumulator {
    std::size_t hits = 0;
    std::size_t count = 0;
    double precision = 0.0;
    double recall = 0.0;
    double levenshtein = 0.0;
    std::size_t with_distance = 0;
    double elapsed = 0.0;
    std::size_t with_elapsed = 0;
  };
  using Key = std::tuple<int, std::size_t, std::size_t>;
  std::map<Key, Accumulator> groups;
  for (const auto& row : rows) {
    auto& acc = groups[{int(row.configuration), row.k, row.n}];
    acc.hits += row.hit ? 1 : 0;
    ++acc.count;
    acc.precision += row.precision;
    acc.recall += row.recall;
    if (row.levenshtein) {
      acc.levenshtein += double(*row.levenshtein);
      ++acc.with_distance;
    }
    if (row.elapsed_seconds) {
      acc.elapsed += *row.elapsed_seconds;
      ++acc.with_elapsed;
    }
  }
  std::vector<Aggregate> out;
  for (const auto& [key, acc] : groups) {
    Aggregate a;
    a.configuration = Configuration(std::get<0>(key));
    a.k = std::get<1>(key);
    a.n = std::get<2>(key);
    a.projects = acc.count;
    a.success_rate = success_rate(acc.hits, acc.count);
    a.mean_precision = acc.precision / double(a.projects);
    a.mean_recall = acc.recall / double(a.projects);
    if (acc.with_distance > 0) a.mean_levenshtein = acc.levenshtein / double(acc.with_distance);
    if (acc.with_elapsed == a.projects) a.mean_elapsed_seconds = acc.elapsed / double(a.projects);
    out.push_back(a);
  }
  return out;
}

std::vector<CategoryCorrelation> correlate_categories(const Corpus& corpus, const std::vector<EvalRow>& rows) {
  std::map<std::string, std::size_t> cardinality;
  for (const auto& p : corpus.projects()) ++cardinality[category_of(p)];

  struct Sum {
    double precision = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::string, Sum>> groups;
  for (const auto& row : rows) {
    auto& s = groups[{row.k, row.n}][row.category];
    s.precision += row.precision;
    ++s.count;
  }
  std::vector<CategoryCorrelation> out;
  for (const auto& [key, by_category] : groups) {
    CategoryCorrelation c;
    c.k = key.first;
    c.n = key.second;
    std::vector<double> sizes, precisions;
    for (const auto& [category, s] : by_category) {
      const auto card = cardinality.contains(category) ? cardinality.at(category) : 0;
      c.categories.push_back({category, card, s.count, s.precision / double(s.count)});
      sizes.push_back(double(card));
      precisions.push_back(s.precision / double(s.count));
    }
    if (sizes.size() >= 2) {
      c.spearman = spearman(sizes, precisions);
      c.kendall = kendall(sizes, precisions);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace focus
