#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "focus/engine.hpp"

namespace httplib {
class Server;
}

namespace focus {

struct RequestDeclaration {
  std::string name;
  std::vector<std::string> invocations;
};

struct RecommendRequest {
  std::vector<RequestDeclaration> context;
  RequestDeclaration active;
  std::size_t k = 4;
  std::size_t M = 25;
  std::size_t N = 20;
  std::size_t snippet_count = 5;
  std::size_t query_size = 5;
};

inline constexpr std::size_t kMaxRequestParameter = 1000;

class RequestError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

RecommendRequest parse_recommend_request(const nlohmann::json& body);

// The request as a transient active project. Invocations the corpus does not
// know get ids past the end of its vocabulary.
ActiveProject to_active_project(const Corpus& corpus, const RecommendRequest& request);

// RecommendResponse document: apis, snippets, fallback_used, elapsed_ms.
nlohmann::json recommend_response(const Engine& engine, const RecommendRequest& request);

struct HttpResult {
  int status = 200;
  nlohmann::json body;
};

// JSON-over-HTTP front end. Handlers are usable without a socket; mount()
// wires them to an httplib server.
class Service {
 public:
  void load(std::shared_ptr<const Engine> engine);
  std::shared_ptr<const Engine> engine() const;

  HttpResult handle_recommend(std::string_view body) const;
  HttpResult handle_health() const;

  void mount(httplib::Server& server) const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const Engine> engine_;
};

}  // namespace focus
