#include "focus/report.hpp"

#include <iomanip>
#include <sstream>
#include <map>

namespace focus {

using nlohmann::json;

namespace {

template <typename T>
json optional_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

json to_json(const EvalReport& report) {
  const auto& cfg = report.config;
  json out;
  out["format"] = "focus-eval-report";
  out["version"] = 1;
  out["config"] = {
      {"configuration", to_string(cfg.configuration)},
      {"k", cfg.k_values},
      {"M", cfg.M},
      {"N", cfg.n_values},
      {"folds", to_string(cfg.folds)},
      {"seed", cfg.seed},
      {"query_size", cfg.query_size},
      {"similarity_weighted", cfg.similarity_weighted},
      {"timings", cfg.timings},
  };
  out["environment"] = {
      {"projects", report.corpus_projects},
      {"declarations", report.corpus_declarations},
      {"vocabulary", report.corpus_vocabulary},
      {"fold_count", report.fold_count},
  };

  std::map<std::string, std::size_t> histogram;
  auto& skipped = out["skipped"] = json::array();
  for (const auto& s : report.skipped) {
    skipped.push_back({{"project", s.project}, {"reason", s.reason}});
    ++histogram[s.reason];
  }
  out["skip_reasons"] = histogram;

  auto& rows = out["rows"] = json::array();
  for (const auto& r : report.rows) {
    json row = {
        {"project", r.project},
        {"category", r.category},
        {"configuration", to_string(r.configuration)},
        {"k", r.k},
        {"N", r.n},
        {"hit", r.hit},
        {"precision", r.precision},
        {"recall", r.recall},
        {"gt_size", r.ground_truth_size},
        {"levenshtein", optional_value(r.levenshtein)},
        {"fallback_used", r.fallback_used},
    };
    if (r.elapsed_seconds) row["elapsed_seconds"] = *r.elapsed_seconds;
    rows.push_back(std::move(row));
  }

  auto& aggregates = out["aggregates"] = json::array();
  for (const auto& a : report.aggregates) {
    json agg = {
        {"configuration", to_string(a.configuration)},
        {"k", a.k},
        {"N", a.n},
        {"projects", a.projects},
        {"success_rate", a.success_rate},
        {"mean_precision", a.mean_precision},
        {"mean_recall", a.mean_recall},
        {"mean_levenshtein", optional_value(a.mean_levenshtein)},
    };
    if (a.mean_elapsed_seconds) agg["mean_elapsed_seconds"] = *a.mean_elapsed_seconds;
    aggregates.push_back(std::move(agg));
  }

  auto& categories = out["categories"] = json::array();
  for (const auto& c : report.categories) {
    json entry = {{"k", c.k}, {"N", c.n}, {"spearman", optional_value(c.spearman)},
                  {"kendall", optional_value(c.kendall)}};
    auto& list = entry["categories"] = json::array();
    for (const auto& p : c.categories) {
      list.push_back({{"category", p.category},
                      {"cardinality", p.cardinality},
                      {"evaluated", p.evaluated},
                      {"mean_precision", p.mean_precision}});
    }
    categories.push_back(std::move(entry));
  }
  return out;
}

void write_csv(std::ostream& out, const EvalReport& report) {
  out << "project,category,configuration,k,N,hit,precision,recall,gt_size,levenshtein,fallback_used";
  if (report.config.timings) out << ",elapsed_seconds";
  out << '\n';
  for (const auto& r : report.rows) {
    out << csv_field(r.project) << ',' << csv_field(r.category) << ',' << to_string(r.configuration) << ','
        << r.k << ',' << r.n << ',' << (r.hit ? 1 : 0) << ',' << format_double(r.precision) << ','
        << format_double(r.recall) << ',' << r.ground_truth_size << ',';
    if (r.levenshtein) out << *r.levenshtein;
    out << ',' << (r.fallback_used ? 1 : 0);
    if (report.config.timings) {
      out << ',';
      if (r.elapsed_seconds) out << format_double(*r.elapsed_seconds);
    }
    out << '\n';
  }
}

std::vector<EvalRow> rows_from_json(const json& report) {
  std::vector<EvalRow> rows;
  for (const auto& r : report.at("rows")) {
    EvalRow row;
    row.project = r.at("project").get<std::string>();
    row.category = r.at("category").get<std::string>();
    auto configuration = parse_configuration(r.at("configuration").get<std::string>());
    if (!configuration) throw std::invalid_argument("unknown configuration in report row");
    row.configuration = *configuration;
    row.k = r.at("k").get<std::size_t>();
    row.n = r.at("N").get<std::size_t>();
    row.hit = r.at("hit").get<bool>();
    row.precision = r.at("precision").get<double>();
    row.recall = r.at("recall").get<double>();
    row.ground_truth_size = r.at("gt_size").get<std::size_t>();
    if (!r.at("levenshtein").is_null()) row.levenshtein = r.at("levenshtein").get<std::size_t>();
    row.fallback_used = r.at("fallback_used").get<bool>();
    if (r.contains("elapsed_seconds")) row.elapsed_seconds = r.at("elapsed_seconds").get<double>();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace focus
