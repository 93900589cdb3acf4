#include "focus/service.hpp"

#include <set>
#include <unordered_map>

#include <httplib.h>

namespace focus {

using nlohmann::json;

namespace {

RequestDeclaration parse_declaration(const json& value, const std::string& where) {
  if (!value.is_object()) throw RequestError(where + " must be an object");
  RequestDeclaration decl;
  auto name = value.find("name");
  if (name == value.end() || !name->is_string() || name->get<std::string>().empty()) {
    throw RequestError(where + ".name must be a non-empty string");
  }
  decl.name = name->get<std::string>();
  auto calls = value.find("invocations");
  if (calls != value.end() && !calls->is_null()) {
    if (!calls->is_array()) throw RequestError(where + ".invocations must be an array");
    for (const auto& c : *calls) {
      if (!c.is_string() || c.get<std::string>().empty()) {
        throw RequestError(where + ".invocations must hold non-empty strings");
      }
      decl.invocations.push_back(c.get<std::string>());
    }
  }
  return decl;
}

std::size_t parse_parameter(const json& body, const char* key, std::size_t fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number_integer()) throw RequestError(std::string(key) + " must be an integer");
  const auto value = it->get<std::int64_t>();
  if (value < 1 || std::size_t(value) > kMaxRequestParameter) {
    throw RequestError(std::string(key) + " must be in [1, " + std::to_string(kMaxRequestParameter) + "]");
  }
  return std::size_t(value);
}

}  // namespace

RecommendRequest parse_recommend_request(const json& body) {
  if (!body.is_object()) throw RequestError("request body must be a JSON object");
  RecommendRequest request;
  auto active = body.find("active");
  if (active == body.end()) throw RequestError("request must contain an 'active' object");
  request.active = parse_declaration(*active, "active");

  auto context = body.find("context_declarations");
  if (context != body.end() && !context->is_null()) {
    if (!context->is_array()) throw RequestError("context_declarations must be an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < context->size(); ++i) {
      auto decl = parse_declaration((*context)[i], "context_declarations[" + std::to_string(i) + "]");
      if (!names.insert(decl.name).second) throw RequestError("duplicate context declaration '" + decl.name + "'");
      request.context.push_back(std::move(decl));
    }
    if (names.contains(request.active.name)) {
      throw RequestError("active declaration name also appears among context declarations");
    }
  }
  request.k = parse_parameter(body, "k", request.k);
  request.M = parse_parameter(body, "M", request.M);
  request.N = parse_parameter(body, "N", request.N);
  request.snippet_count = parse_parameter(body, "snippet_count", request.snippet_count);
  request.query_size = parse_parameter(body, "query_size", request.query_size);
  return request;
}

ActiveProject to_active_project(const Corpus& corpus, const RecommendRequest& request) {
  const auto& vocab = corpus.vocabulary();
  std::unordered_map<std::string, std::uint32_t> unknown;
  auto resolve = [&](const RequestDeclaration& in) {
    Declaration out;
    out.name = in.name;
    for (const auto& canonical : in.invocations) {
      if (auto id = vocab.find(canonical)) {
        out.invocations.push_back(*id);
      } else {
        auto [it, inserted] =
            unknown.try_emplace(canonical, std::uint32_t(vocab.size() + unknown.size()));
        out.invocations.push_back(InvocationId{it->second});
      }
    }
    return out;
  };
  // Corpus ids are never empty, so the transient project cannot shadow one.
  ActiveProject project;
  for (const auto& decl : request.context) project.declarations.push_back(resolve(decl));
  project.active = project.declarations.size();
  project.declarations.push_back(resolve(request.active));
  return project;
}

json recommend_response(const Engine& engine, const RecommendRequest& request) {
  const auto& corpus = engine.corpus();
  const auto active = to_active_project(corpus, request);
  EngineOptions options;
  options.k = request.k;
  options.M = request.M;
  options.N = request.N;

  const auto recs = engine.recommend(active, options);
  json apis = json::array();
  for (std::size_t r = 0; r < recs.items.size(); ++r) {
    apis.push_back({{"invocation", corpus.vocabulary().canonical(recs.items[r].invocation)},
                    {"score", recs.items[r].score},
                    {"rank", r + 1}});
  }
  json snippets = json::array();
  const auto found = recommend_snippets(corpus, recs, active.active_declaration(), recs.projects,
                                        request.query_size, request.snippet_count);
  for (const auto& s : found) {
    json entry = {{"declaration", s.declaration_name},
                  {"project", s.project_id},
                  {"score", s.jaccard_score},
                  {"sequence", s.invocation_sequence}};
    if (s.body) entry["body"] = *s.body;
    snippets.push_back(std::move(entry));
  }
  return {{"apis", std::move(apis)},
          {"snippets", std::move(snippets)},
          {"fallback_used", recs.fallback_used},
          {"elapsed_ms", recs.elapsed_seconds * 1000.0}};
}

void Service::load(std::shared_ptr<const Engine> engine) {
  std::lock_guard lock(mutex_);
  engine_ = std::move(engine);
}

std::shared_ptr<const Engine> Service::engine() const {
  std::lock_guard lock(mutex_);
  return engine_;
}

HttpResult Service::handle_recommend(std::string_view body) const {
  const auto engine = this->engine();
  if (!engine) return {503, {{"error", "corpus is still loading"}}};
  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::parse_error& e) {
    return {400, {{"error", std::string("malformed JSON: ") + e.what()}}};
  }
  try {
    const auto request = parse_recommend_request(parsed);
    return {200, recommend_response(*engine, request)};
  } catch (const RequestError& e) {
    return {400, {{"error", e.what()}}};
  }
}

HttpResult Service::handle_health() const {
  const auto engine = this->engine();
  if (!engine) return {200, {{"status", "loading"}, {"corpus", nullptr}}};
  const auto& corpus = engine->corpus();
  return {200,
          {{"status", "ok"},
           {"corpus",
            {{"projects", corpus.projects().size()},
             {"declarations", corpus.declaration_total()},
             {"vocabulary", corpus.vocabulary().size()}}}}};
}

void Service::mount(httplib::Server& server) const {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto reply = [](httplib::Response& res, const HttpResult& result) {
    res.status = result.status;
    res.set_content(result.body.dump(), "application/json");
  };
  server.Post("/api/v1/recommend", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_recommend(req.body));
  });
  server.Get("/api/v1/health", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_health());
  });
  server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

}  // namespace focus
