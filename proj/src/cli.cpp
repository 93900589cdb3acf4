#include "focus/cli.hpp"

#include <algorithm>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "focus/corpus.hpp"
#include "focus/engine.hpp"
#include "focus/evaluation.hpp"
#include "focus/report.hpp"
#include "focus/service.hpp"

// httplib.h must come after Eigen: its system headers leave macros that break Eigen.
#include <CLI11.hpp>
#include <httplib.h>

namespace focus::cli {

using nlohmann::json;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string facts;
  std::string snippets;
  std::uint64_t seed = 0;
  bool json = false;
};

void add_common(CLI::App& cmd, CommonOptions& common) {
  cmd.add_option("--facts", common.facts, "Corpus facts file (line-delimited JSON)")->required();
  cmd.add_option("--snippets", common.snippets, "Snippet store (line-delimited JSON)");
  cmd.add_option("--seed", common.seed, "Shuffling seed");
  cmd.add_flag("--json", common.json, "Machine-readable output");
}

Corpus load(const CommonOptions& common) {
  for (const auto& path : {common.facts, common.snippets}) {
    if (!path.empty() && !std::filesystem::exists(path)) throw InputError("no such file: " + path);
  }
  try {
    return load_corpus(common.facts, common.snippets.empty() ? std::nullopt : std::optional(common.snippets));
  } catch (const CorpusError& e) {
    throw InputError(e.what());
  }
}

std::string num(const json& v) { return v.dump(); }

// ---- stats ---------------------------------------------------------------

struct StatsOptions {
  std::size_t top = 20;
  bool recommended = false;
  std::string configuration = "c12";
  std::size_t k = 4;
  std::size_t N = 20;
};

json most_recommended(const Corpus& corpus, const StatsOptions& opts) {
  auto configuration = parse_configuration(opts.configuration);
  if (!configuration) throw InputError("unknown configuration '" + opts.configuration + "'");
  const RatingTensor tensor(corpus);
  const auto& vocab = corpus.vocabulary();
  std::vector<std::size_t> times(vocab.size(), 0);
  std::size_t queries = 0;
  for (std::size_t p = 0; p < corpus.projects().size(); ++p) {
    auto split = split_project(corpus.project(p), *configuration);
    auto* s = std::get_if<EvalSplit>(&split);
    if (!s) continue;
    std::vector<std::size_t> others;
    for (std::size_t q = 0; q < corpus.projects().size(); ++q) {
      if (q != p) others.push_back(q);
    }
    if (others.empty()) continue;
    const Background background(corpus, std::move(others));
    EngineOptions options;
    options.k = opts.k;
    options.N = opts.N;
    const auto recs = recommend_apis(background, tensor, s->active_project(corpus.project(p).id), options);
    for (const auto& item : recs.items) ++times[item.invocation.value];
    ++queries;
  }

  // Popularity rank: position when ordered by project count.
  std::vector<std::uint32_t> by_popularity(vocab.size());
  std::iota(by_popularity.begin(), by_popularity.end(), 0u);
  std::sort(by_popularity.begin(), by_popularity.end(), [&](auto a, auto b) {
    if (corpus.project_count({a}) != corpus.project_count({b})) {
      return corpus.project_count({a}) > corpus.project_count({b});
    }
    return vocab.canonical({a}) < vocab.canonical({b});
  });
  std::vector<std::size_t> popularity_rank(vocab.size());
  for (std::size_t r = 0; r < by_popularity.size(); ++r) popularity_rank[by_popularity[r]] = r + 1;

  std::vector<std::uint32_t> order;
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    if (times[i] > 0) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (times[a] != times[b]) return times[a] > times[b];
    return vocab.canonical({a}) < vocab.canonical({b});
  });
  order.resize(std::min(order.size(), opts.top));
  json list = json::array();
  for (auto i : order) {
    list.push_back({{"invocation", vocab.canonical({i})},
                    {"times_recommended", times[i]},
                    {"projects", corpus.project_count({i})},
                    {"popularity_rank", popularity_rank[i]}});
  }
  return {{"configuration", to_string(*configuration)}, {"k", opts.k}, {"N", opts.N},
          {"queries", queries}, {"invocations", std::move(list)}};
}

int run_stats(const CommonOptions& common, const StatsOptions& opts, std::ostream& out) {
  const auto corpus = load(common);
  const auto& vocab = corpus.vocabulary();
  std::size_t call_sites = 0;
  std::map<std::string, std::size_t> categories;
  for (const auto& p : corpus.projects()) {
    ++categories[p.category.value_or(std::string(kUncategorized))];
    for (const auto& d : p.declarations) call_sites += d.invocations.size();
  }
  std::size_t single_project = 0;
  std::vector<std::uint32_t> order(vocab.size());
  std::iota(order.begin(), order.end(), 0u);
  for (auto i : order) single_project += corpus.project_count({i}) == 1 ? 1 : 0;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (corpus.project_count({a}) != corpus.project_count({b})) {
      return corpus.project_count({a}) > corpus.project_count({b});
    }
    return vocab.canonical({a}) < vocab.canonical({b});
  });
  order.resize(std::min(order.size(), opts.top));

  json doc;
  doc["projects"] = corpus.projects().size();
  doc["declarations"] = corpus.declaration_total();
  doc["vocabulary"] = vocab.size();
  doc["call_sites"] = call_sites;
  doc["snippets"] = corpus.snippets().size();
  doc["categories"] = categories;
  doc["single_project_invocations"] = single_project;
  auto& frequent = doc["most_frequent"] = json::array();
  for (auto i : order) {
    frequent.push_back({{"invocation", vocab.canonical({i})},
                        {"projects", corpus.project_count({i})},
                        {"declarations", corpus.declaration_count({i})}});
  }
  if (opts.recommended) doc["most_recommended"] = most_recommended(corpus, opts);

  if (common.json) {
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  out << "projects: " << num(doc["projects"]) << '\n'
      << "declarations: " << num(doc["declarations"]) << '\n'
      << "vocabulary: " << num(doc["vocabulary"]) << '\n'
      << "call sites: " << num(doc["call_sites"]) << '\n'
      << "snippets: " << num(doc["snippets"]) << '\n'
      << "invocations used by a single project: " << num(doc["single_project_invocations"]) << '\n'
      << "categories:\n";
  for (const auto& [name, count] : doc["categories"].items()) out << "  " << name << ": " << num(count) << '\n';
  out << "most frequent invocations (projects, declarations):\n";
  for (const auto& f : frequent) {
    out << "  " << f["invocation"].get<std::string>() << "  " << num(f["projects"]) << "  "
        << num(f["declarations"]) << '\n';
  }
  if (opts.recommended) {
    const auto& rec = doc["most_recommended"];
    out << "most recommended invocations over " << num(rec["queries"])
        << " queries (times, projects, popularity rank):\n";
    for (const auto& f : rec["invocations"]) {
      out << "  " << f["invocation"].get<std::string>() << "  " << num(f["times_recommended"]) << "  "
          << num(f["projects"]) << "  " << num(f["popularity_rank"]) << '\n';
    }
  }
  return kExitOk;
}

// ---- recommend -----------------------------------------------------------

struct RecommendOptions {
  std::string active_file;
  std::optional<std::size_t> k, M, N, snippet_count;
};

int run_recommend(const CommonOptions& common, const RecommendOptions& opts, std::ostream& out) {
  if (!std::filesystem::exists(opts.active_file)) throw InputError("no such file: " + opts.active_file);
  std::ifstream in(opts.active_file);
  json body;
  try {
    body = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed active file: " + std::string(e.what()));
  }
  // Command-line values override the file's.
  if (opts.k) body["k"] = *opts.k;
  if (opts.M) body["M"] = *opts.M;
  if (opts.N) body["N"] = *opts.N;
  if (opts.snippet_count) body["snippet_count"] = *opts.snippet_count;
  RecommendRequest request;
  try {
    request = parse_recommend_request(body);
  } catch (const RequestError& e) {
    throw InputError(e.what());
  }
  const Engine engine(load(common));
  const auto response = recommend_response(engine, request);
  if (common.json) {
    out << response.dump(2) << '\n';
    return kExitOk;
  }
  if (response["fallback_used"].get<bool>()) out << "(no similar declarations; popularity fallback)\n";
  out << "rank  score  invocation\n";
  for (const auto& api : response["apis"]) {
    out << num(api["rank"]) << "  " << num(api["score"]) << "  " << api["invocation"].get<std::string>() << '\n';
  }
  for (const auto& s : response["snippets"]) {
    out << "\n--- " << s["project"].get<std::string>() << " :: " << s["declaration"].get<std::string>()
        << " (jaccard " << num(s["score"]) << ")\n";
    if (s.contains("body")) {
      out << s["body"].get<std::string>() << '\n';
    } else {
      for (const auto& call : s["sequence"]) out << "  " << call.get<std::string>() << '\n';
    }
  }
  return kExitOk;
}

// ---- evaluate ------------------------------------------------------------

struct EvaluateOptions {
  std::string configuration = "c12";
  std::string folds = "10";
  std::vector<std::size_t> k_list{4};
  std::vector<std::size_t> n_list{1, 5, 10, 15, 20};
  std::size_t M = 25;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
  std::string csv;
  bool timings = false;
  bool similarity_weighted = false;
};

int run_evaluate(const CommonOptions& common, const EvaluateOptions& opts, std::ostream& out,
                 std::ostream& err) {
  EvalConfig config;
  auto configuration = parse_configuration(opts.configuration);
  if (!configuration) throw InputError("unknown configuration '" + opts.configuration + "'");
  config.configuration = *configuration;
  if (opts.folds == "10") {
    config.folds = FoldScheme::TenFold;
  } else if (opts.folds == "loo") {
    config.folds = FoldScheme::LeaveOneOut;
  } else {
    throw InputError("--folds must be 10 or loo");
  }
  config.k_values = opts.k_list;
  config.n_values = opts.n_list;
  config.M = opts.M;
  config.seed = common.seed;
  config.jobs = opts.jobs;
  config.timings = opts.timings;
  config.similarity_weighted = opts.similarity_weighted;

  const auto corpus = load(common);
  EvalReport report;
  try {
    report = run_evaluation(corpus, config);
  } catch (const EvaluationError& e) {
    err << "evaluation failed: " << e.what() << '\n';
    return kExitEmptyEvaluation;
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const auto doc = to_json(report);

  if (!opts.out.empty()) {
    std::ofstream file(opts.out, std::ios::binary);
    if (!file) throw InputError("cannot write " + opts.out);
    file << doc.dump(2) << '\n';
  }
  std::string csv_path = opts.csv;
  if (csv_path.empty() && !opts.out.empty()) {
    csv_path = std::filesystem::path(opts.out).replace_extension(".csv").string();
  }
  if (!csv_path.empty()) {
    std::ofstream file(csv_path, std::ios::binary);
    if (!file) throw InputError("cannot write " + csv_path);
    write_csv(file, report);
  }

  if (common.json) {
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  out << "configuration " << to_string(config.configuration) << ", " << to_string(config.folds) << ", "
      << report.rows.size() / config.n_values.size() / config.k_values.size() << " projects evaluated, "
      << report.skipped.size() << " skipped\n";
  out << "k  N  success_rate  mean_precision  mean_recall  mean_levenshtein\n";
  for (const auto& a : doc["aggregates"]) {
    out << num(a["k"]) << "  " << num(a["N"]) << "  " << num(a["success_rate"]) << "  "
        << num(a["mean_precision"]) << "  " << num(a["mean_recall"]) << "  " << num(a["mean_levenshtein"])
        << '\n';
  }
  for (const auto& c : doc["categories"]) {
    out << "categories k=" << num(c["k"]) << " N=" << num(c["N"]) << ": spearman " << num(c["spearman"])
        << ", kendall " << num(c["kendall"]) << '\n';
  }
  return kExitOk;
}

// ---- serve ---------------------------------------------------------------

httplib::Server* active_server = nullptr;

extern "C" void stop_server(int) {
  if (active_server) active_server->stop();
}

int run_serve(const CommonOptions& common, const std::string& listen, std::ostream& out, std::ostream& err) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw InputError("--listen expects host:port");
  const auto host = listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw InputError("invalid port in --listen");
  }
  for (const auto& path : {common.facts, common.snippets}) {
    if (!path.empty() && !std::filesystem::exists(path)) throw InputError("no such file: " + path);
  }

  Service service;
  httplib::Server server;
  service.mount(server);
  if (!server.bind_to_port(host, port)) {
    err << "cannot listen on " << listen << '\n';
    return kExitInputError;
  }
  active_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  std::thread http([&] { server.listen_after_bind(); });

  int status = kExitOk;
  try {
    service.load(std::make_shared<const Engine>(load(common)));
    out << "serving " << service.handle_health().body["corpus"].dump() << " on " << listen << std::endl;
  } catch (const InputError& e) {
    err << e.what() << '\n';
    server.stop();
    status = kExitInputError;
  }
  http.join();
  active_server = nullptr;
  return status;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Context-aware API and code snippet recommender", "focus"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* stats = app.add_subcommand("stats", "Corpus counts and invocation frequency accounting");
  add_common(*stats, common);
  StatsOptions stats_opts;
  stats->add_option("--top", stats_opts.top, "Entries per list")->check(CLI::PositiveNumber);
  stats->add_flag("--recommended", stats_opts.recommended,
                  "Also tally recommendations over a leave-one-out pass");
  stats->add_option("--config", stats_opts.configuration, "Split used by --recommended")
      ->check(CLI::IsMember({"c11", "c12", "c21", "c22"}));
  stats->add_option("-k", stats_opts.k, "Neighbor projects for --recommended")->check(CLI::PositiveNumber);
  stats->add_option("-N", stats_opts.N, "Cut-off for --recommended")->check(CLI::PositiveNumber);

  auto* recommend = app.add_subcommand("recommend", "Recommend invocations and snippets for one context");
  add_common(*recommend, common);
  RecommendOptions rec_opts;
  recommend->add_option("--active-file", rec_opts.active_file, "Request document (JSON)")->required();
  recommend->add_option("-k", rec_opts.k, "Neighbor projects")->check(CLI::PositiveNumber);
  recommend->add_option("-M", rec_opts.M, "Neighbor declarations")->check(CLI::PositiveNumber);
  recommend->add_option("-N", rec_opts.N, "Number of invocations")->check(CLI::PositiveNumber);
  recommend->add_option("--snippet-count", rec_opts.snippet_count, "Number of snippets")
      ->check(CLI::PositiveNumber);

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated evaluation");
  add_common(*evaluate, common);
  EvaluateOptions eval_opts;
  evaluate->add_option("--config", eval_opts.configuration, "c11, c12, c21 or c22")
      ->check(CLI::IsMember({"c11", "c12", "c21", "c22"}));
  evaluate->add_option("--folds", eval_opts.folds, "10 or loo")->check(CLI::IsMember({"10", "loo"}));
  evaluate->add_option("--k-list", eval_opts.k_list, "Neighbor project counts")->delimiter(',');
  evaluate->add_option("--n-list", eval_opts.n_list, "Cut-offs")->delimiter(',');
  evaluate->add_option("-M", eval_opts.M, "Neighbor declarations")->check(CLI::PositiveNumber);
  evaluate->add_option("--jobs", eval_opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
  evaluate->add_option("--out", eval_opts.out, "JSON report path (CSV written alongside)");
  evaluate->add_option("--csv", eval_opts.csv, "CSV report path");
  evaluate->add_flag("--timings", eval_opts.timings, "Record per-query wall-clock time");
  evaluate->add_flag("--similarity-weighted", eval_opts.similarity_weighted,
                     "Experimental: scale neighbor ratings by project similarity");

  auto* serve = app.add_subcommand("serve", "Run the JSON-over-HTTP service");
  add_common(*serve, common);
  std::string listen = "127.0.0.1:8080";
  serve->add_option("--listen", listen, "host:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (stats->parsed()) return run_stats(common, stats_opts, out);
    if (recommend->parsed()) return run_recommend(common, rec_opts, out);
    if (evaluate->parsed()) return run_evaluate(common, eval_opts, out, err);
    if (serve->parsed()) return run_serve(common, listen, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace focus::cli
